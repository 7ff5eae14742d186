#!/usr/bin/env python3
"""Convert SVHN cropped-digit .mat files to the RAWDS container.

Usage:
    python3 scripts/svhn_to_rawds.py train_32x32.mat data/svhn/svhn-train.rawds
    python3 scripts/svhn_to_rawds.py test_32x32.mat  data/svhn/svhn-test.rawds

RAWDS layout (little-endian): magic "RWDS", u32 version=1, u32 N, u32 C,
u32 H, u32 W, N label bytes, then N*C*H*W pixel bytes in NCHW order.
SVHN stores labels 1..10 with "10" meaning digit 0; this remaps to 0..9.
"""
import struct
import sys

import numpy as np
import scipy.io


def main(src: str, dst: str) -> None:
    mat = scipy.io.loadmat(src)
    x = mat["X"]                      # H x W x C x N, uint8
    y = mat["y"].ravel().astype(np.int64) % 10  # 10 -> 0
    n = x.shape[3]
    nchw = np.transpose(x, (3, 2, 0, 1))  # N x C x H x W
    with open(dst, "wb") as f:
        f.write(b"RWDS")
        f.write(struct.pack("<IIIII", 1, n, nchw.shape[1], nchw.shape[2], nchw.shape[3]))
        f.write(y.astype(np.uint8).tobytes())
        f.write(np.ascontiguousarray(nchw, dtype=np.uint8).tobytes())
    print(f"{dst}: {n} samples, {nchw.shape[1]}x{nchw.shape[2]}x{nchw.shape[3]}")


if __name__ == "__main__":
    if len(sys.argv) != 3:
        sys.exit(__doc__)
    main(sys.argv[1], sys.argv[2])
