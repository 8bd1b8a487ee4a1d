"""Finite-difference checks for every autograd primitive."""

import numpy as np
import pytest

from textrf.nn import Tensor, concat, conv1d, finite_difference_check, maximum, minimum, parameter


def check(loss_fn, params, tol=1e-6, seed=0):
    err = finite_difference_check(loss_fn, params, rng=np.random.default_rng(seed))
    assert err < tol, f"max relative gradient error {err}"


def rand_param(shape, seed):
    return parameter(np.random.default_rng(seed).normal(size=shape))


def test_add_mul_sub_div():
    a, b = rand_param((3, 4), 1), rand_param((3, 4), 2)
    b.data = np.abs(b.data) + 0.5
    check(lambda: ((a * b + a - b) / b).sum(), [a, b])


def test_broadcasting():
    a, b = rand_param((3, 4), 1), rand_param((4,), 2)
    check(lambda: (a + b).sum(), [a, b])
    check(lambda: (a * b).sum(), [a, b])


def test_matmul_2d():
    a, b = rand_param((3, 4), 1), rand_param((4, 2), 2)
    check(lambda: (a @ b).sum(), [a, b])


def test_matmul_batched():
    a, b = rand_param((2, 3, 4), 1), rand_param((4, 5), 2)
    check(lambda: (a @ b).sum(), [a, b])
    c = rand_param((2, 5, 3), 3)
    check(lambda: (c @ (a @ b)).sum(), [a, b, c])


def test_relu():
    a = rand_param((5, 5), 1)
    a.data += 0.05 * np.sign(a.data)  # keep entries away from the kink
    check(lambda: a.relu().sum(), [a])


def test_exp_log_pow():
    a = rand_param((4,), 1)
    a.data = np.abs(a.data) + 0.5
    check(lambda: a.exp().sum(), [a])
    check(lambda: a.log().sum(), [a])
    check(lambda: (a**3.0).sum(), [a])
    check(lambda: (a**0.5).sum(), [a])


def test_pow_zero_exponent_has_zero_grad():
    a = rand_param((3,), 1)
    out = (a**0.0).sum()
    out.backward()
    assert a.grad is None or np.allclose(a.grad, 0.0)


def test_sum_mean_axes():
    a = rand_param((3, 4, 2), 1)
    check(lambda: a.sum(axis=1).sum(), [a])
    check(lambda: a.mean(axis=(0, 2)).sum(), [a])
    check(lambda: (a.sum(axis=2, keepdims=True) * a).sum(), [a])


def test_softmax_rows_sum_to_one():
    a = rand_param((6, 7), 1)
    y = a.softmax(axis=1)
    assert np.allclose(y.data.sum(axis=1), 1.0, atol=1e-12)


def test_softmax_gradient():
    a = rand_param((3, 5), 1)
    w = np.random.default_rng(9).normal(size=(3, 5))
    check(lambda: (a.softmax(axis=1) * w).sum(), [a])


def test_getitem_slice_and_fancy():
    a = rand_param((6, 3), 1)
    check(lambda: a[1:4].sum(), [a])
    check(lambda: a[:, 1].sum(), [a])
    idx = np.array([0, 2, 2, 5])
    check(lambda: a[idx].sum(), [a])  # repeated index accumulates


def test_reshape_swapaxes():
    a = rand_param((2, 3, 4), 1)
    check(lambda: (a.reshape(6, 4) @ rand_param((4, 1), 2).data).sum(), [a])
    check(lambda: a.swapaxes(0, 2).sum(axis=0).sum(), [a])


def test_concat():
    a, b = rand_param((2, 3), 1), rand_param((2, 2), 2)
    check(lambda: concat([a, b], axis=1).sum(), [a, b])


def test_maximum_minimum():
    a, b = rand_param((4, 4), 1), rand_param((4, 4), 2)
    # perturb away from ties
    b.data += 0.1
    w = np.random.default_rng(3).normal(size=(4, 4))
    check(lambda: (maximum(a, b) * w).sum(), [a, b])
    check(lambda: (minimum(a, b) * w).sum(), [a, b])


def test_clamp_min():
    a = rand_param((5,), 1)
    check(lambda: a.clamp_min(0.25).sum(), [a])


def test_conv1d_forward_matches_naive():
    rng = np.random.default_rng(0)
    x = rng.normal(size=(2, 3, 9))
    w = rng.normal(size=(4, 3, 3))
    b = rng.normal(size=4)
    for stride, pad in [(1, 1), (2, 1), (1, 0), (3, 2)]:
        out = conv1d(Tensor(x), Tensor(w), Tensor(b), stride=stride, padding=pad).data
        xp = np.pad(x, ((0, 0), (0, 0), (pad, pad)))
        t_out = (x.shape[2] + 2 * pad - 3) // stride + 1
        ref = np.zeros((2, 4, t_out))
        for bi in range(2):
            for o in range(4):
                for t in range(t_out):
                    acc = b[o]
                    for c in range(3):
                        for k in range(3):
                            acc += xp[bi, c, t * stride + k] * w[o, c, k]
                    ref[bi, o, t] = acc
        assert np.allclose(out, ref, atol=1e-12)


def test_conv1d_gradients():
    x = rand_param((2, 3, 8), 1)
    w = rand_param((4, 3, 3), 2)
    b = rand_param((4,), 3)
    for stride, pad in [(1, 1), (2, 1)]:
        check(lambda: conv1d(x, w, b, stride=stride, padding=pad).sum(), [x, w, b])


def test_conv1d_halving_length():
    # stride 2, kernel 3, padding 1 gives ceil(T/2)
    for t in (7, 8, 9, 16):
        x = Tensor(np.zeros((1, 1, t)))
        out = conv1d(x, Tensor(np.zeros((1, 1, 3))), None, stride=2, padding=1)
        assert out.shape[2] == (t + 1) // 2


def test_backward_requires_scalar():
    a = rand_param((3,), 1)
    with pytest.raises(Exception):
        (a * 2).backward()


def test_grad_accumulates_through_diamond():
    a = parameter(np.array([2.0]))
    b = a * 3.0
    out = (b + a * a).sum()  # d/da = 3 + 2a = 7
    out.backward()
    assert np.allclose(a.grad, [7.0])
