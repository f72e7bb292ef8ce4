"""Minimal numpy conv/dense layers with exact backpropagation.

Convolutions are expressed through im2col/col2im so both the forward pass
and every gradient is a plain matrix product; transpose convolution is
implemented as the adjoint of convolution, which makes the gradient pairs
symmetric and easy to verify against finite differences.
"""

import numpy as np


def im2col(x: np.ndarray, kernel: int, stride: int, pad: int) -> np.ndarray:
    """(B,C,H,W) -> (B, C*k*k, OH*OW) patch matrix."""
    b, c, h, w = x.shape
    oh = (h + 2 * pad - kernel) // stride + 1
    ow = (w + 2 * pad - kernel) // stride + 1
    xp = np.pad(x, ((0, 0), (0, 0), (pad, pad), (pad, pad)))
    cols = np.empty((b, c, kernel, kernel, oh, ow), dtype=x.dtype)
    for i in range(kernel):
        for j in range(kernel):
            cols[:, :, i, j] = xp[:, :, i:i + stride * oh:stride,
                                  j:j + stride * ow:stride]
    return cols.reshape(b, c * kernel * kernel, oh * ow)


def col2im(cols: np.ndarray, x_shape: tuple, kernel: int, stride: int,
           pad: int) -> np.ndarray:
    """Adjoint of im2col: scatter-add patches back onto the image grid."""
    b, c, h, w = x_shape
    oh = (h + 2 * pad - kernel) // stride + 1
    ow = (w + 2 * pad - kernel) // stride + 1
    cols = cols.reshape(b, c, kernel, kernel, oh, ow)
    xp = np.zeros((b, c, h + 2 * pad, w + 2 * pad), dtype=cols.dtype)
    for i in range(kernel):
        for j in range(kernel):
            xp[:, :, i:i + stride * oh:stride, j:j + stride * ow:stride] \
                += cols[:, :, i, j]
    if pad:
        return xp[:, :, pad:-pad, pad:-pad]
    return xp


def conv2d(x, weight, bias, stride, pad):
    """Strided convolution; weight (Cout, Cin, k, k). Returns (y, cache)."""
    cout, cin, k, _ = weight.shape
    b = x.shape[0]
    oh = (x.shape[2] + 2 * pad - k) // stride + 1
    ow = (x.shape[3] + 2 * pad - k) // stride + 1
    cols = im2col(x, k, stride, pad)
    wmat = weight.reshape(cout, cin * k * k)
    y = np.einsum("oc,bct->bot", wmat, cols) + bias[None, :, None]
    return y.reshape(b, cout, oh, ow), (x.shape, cols, wmat)


def conv2d_backward(dy, weight, cache, stride, pad):
    cout, cin, k, _ = weight.shape
    x_shape, cols, wmat = cache
    dyf = dy.reshape(dy.shape[0], cout, -1)
    dw = np.einsum("bot,bct->oc", dyf, cols).reshape(weight.shape)
    db = dyf.sum(axis=(0, 2))
    dcols = np.einsum("oc,bot->bct", wmat, dyf)
    dx = col2im(dcols, x_shape, k, stride, pad)
    return dx, dw, db


def conv_transpose2d(x, weight, bias, stride, pad, output_pad):
    """Transpose convolution; weight (Cin, Cout, k, k). Returns (y, cache)."""
    cin, cout, k, _ = weight.shape
    b, _, h, w = x.shape
    oh = (h - 1) * stride - 2 * pad + k + output_pad
    ow = (w - 1) * stride - 2 * pad + k + output_pad
    # Forward pass is the adjoint of a stride-s convolution mapping the
    # (oh, ow) grid down to (h, w); output_pad selects the taller target.
    wmat = weight.reshape(cin, cout * k * k)
    xf = x.reshape(b, cin, h * w)
    cols = np.einsum("ic,bit->bct", wmat, xf)
    y = col2im(cols, (b, cout, oh, ow), k, stride, pad)
    return y + bias[None, :, None, None], (x.shape, xf, wmat, (b, cout, oh, ow))


def conv_transpose2d_backward(dy, weight, cache, stride, pad):
    cin, cout, k, _ = weight.shape
    x_shape, xf, wmat, y_shape = cache
    dcols = im2col(dy, k, stride, pad)
    dw = np.einsum("bit,bct->ic", xf, dcols).reshape(weight.shape)
    db = dy.sum(axis=(0, 2, 3))
    dxf = np.einsum("ic,bct->bit", wmat, dcols)
    dx = dxf.reshape(x_shape)
    return dx, dw, db


def dense(x, weight, bias):
    return x @ weight.T + bias, x


def dense_backward(dy, weight, cache):
    x = cache
    return dy @ weight, dy.T @ x, dy.sum(axis=0)


def leaky_relu(x, slope):
    return np.where(x >= 0, x, slope * x)


def leaky_relu_backward(dy, x, slope):
    return np.where(x >= 0, dy, slope * dy)


def sigmoid(x):
    out = np.empty_like(x)
    pos = x >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-x[pos]))
    ex = np.exp(x[~pos])
    out[~pos] = ex / (1.0 + ex)
    return out


def sigmoid_backward(dy, y):
    return dy * y * (1.0 - y)
