#!/usr/bin/env python3
"""Straight-line reference used to freeze expected values in the Rust tests.

Written independently of the Rust sources: every QR-F line is spelled out
by hand and the 6x6 schedule is expanded from explicit index lists.
Run: python3 echacha_ref.py [--stats]
"""
import random
import struct
import sys

M = 0xFFFFFFFF


def rotl(x, n):
    n %= 32
    return ((x << n) | (x >> (32 - n))) & M if n else x


def qrf(a, b, c, d):
    a = (a + b) & M; d = rotl(d ^ a, 16)
    b = (b + c) & M; c = rotl(c ^ b, 12)
    c = (c + d) & M; b = rotl(b ^ c, 8)
    d = (d + a) & M; c = rotl(c ^ d, 7)
    a = (a + b) & M; d = rotl(d ^ a, 4)
    b = (b + c) & M; c = rotl(c ^ b, 2)
    return a, b, c, d


def qrf_rfc(a, b, c, d):
    a = (a + b) & M; d = rotl(d ^ a, 16)
    c = (c + d) & M; b = rotl(b ^ c, 12)
    a = (a + b) & M; d = rotl(d ^ a, 8)
    c = (c + d) & M; b = rotl(b ^ c, 7)
    a = (a + b) & M; d = rotl(d ^ a, 4)
    c = (c + d) & M; b = rotl(b ^ c, 2)
    return a, b, c, d


def idx(r, c):
    return 6 * r + c


COLUMN_QUADS = []
for col in range(6):
    COLUMN_QUADS.append([idx(0, col), idx(1, col), idx(2, col), idx(3, col)])
    COLUMN_QUADS.append([idx(2, col), idx(3, col), idx(4, col), idx(5, col)])

DIAG_QUADS = []
for j in range(6):
    DIAG_QUADS.append([idx(0, j), idx(1, (j + 1) % 6), idx(2, (j + 2) % 6), idx(3, (j + 3) % 6)])
    DIAG_QUADS.append([idx(2, j), idx(3, (j + 1) % 6), idx(4, (j + 2) % 6), idx(5, (j + 3) % 6)])


def block(state, rounds, f=qrf):
    x = list(state)
    for r in range(rounds):
        quads = COLUMN_QUADS if r % 2 == 0 else DIAG_QUADS
        for q in quads:
            x[q[0]], x[q[1]], x[q[2]], x[q[3]] = f(x[q[0]], x[q[1]], x[q[2]], x[q[3]])
    out = [(x[i] + state[i]) & M for i in range(36)]
    return b"".join(struct.pack("<I", w) for w in out)


SIGMA = [0x61707865, 0x3320646E, 0x79622D32, 0x6B206574]


def init_state(key, nonce, counter):
    return SIGMA + list(key) + list(nonce) + list(counter) + [0] * 16


def chacha20_block(key, counter, nonce):
    def qr(x, a, b, c, d):
        x[a] = (x[a] + x[b]) & M; x[d] = rotl(x[d] ^ x[a], 16)
        x[c] = (x[c] + x[d]) & M; x[b] = rotl(x[b] ^ x[c], 12)
        x[a] = (x[a] + x[b]) & M; x[d] = rotl(x[d] ^ x[a], 8)
        x[c] = (x[c] + x[d]) & M; x[b] = rotl(x[b] ^ x[c], 7)
    s = SIGMA + list(key) + [counter] + list(nonce)
    x = list(s)
    for _ in range(10):
        qr(x, 0, 4, 8, 12); qr(x, 1, 5, 9, 13); qr(x, 2, 6, 10, 14); qr(x, 3, 7, 11, 15)
        qr(x, 0, 5, 10, 15); qr(x, 1, 6, 11, 12); qr(x, 2, 7, 8, 13); qr(x, 3, 4, 9, 14)
    return b"".join(struct.pack("<I", (x[i] + s[i]) & M) for i in range(16))


def hexq(q):
    return "(" + ", ".join("0x%08x" % v for v in q) + ")"


if __name__ == "__main__":
    print("qrf(1,0,0,0)         =", hexq(qrf(1, 0, 0, 0)))
    print("qrf(sigma)           =", hexq(qrf(*SIGMA)))
    print("qrf_rfc(1,0,0,0)     =", hexq(qrf_rfc(1, 0, 0, 0)))
    print("qrf_rfc(sigma)       =", hexq(qrf_rfc(*SIGMA)))
    zero = init_state([0] * 8, [0] * 4, [0] * 4)
    print("echacha zero block   =", block(zero, 20).hex())
    key = list(range(1, 9))
    nonce = [0x09, 0x4A, 0, 0]
    st = init_state(key, nonce, [1, 0, 0, 0])
    print("echacha seq block    =", block(st, 20).hex())
    print("echacha seq rfc-qrf  =", block(st, 20, qrf_rfc).hex())
    st2 = init_state(key, nonce, [2, 0, 0, 0])
    print("echacha seq block c2 =", block(st2, 20).hex())
    rfc_key = struct.unpack("<8I", bytes(range(32)))
    rfc_nonce = struct.unpack("<3I", bytes.fromhex("000000090000004a00000000"))
    print("chacha20 rfc 2.3.2   =", chacha20_block(rfc_key, 1, rfc_nonce).hex())
    print("chacha20 zero        =", chacha20_block([0] * 8, 0, [0] * 3).hex())

    if "--stats" in sys.argv:
        # Monte Carlo references for the propagation and avalanche tests.
        rng = random.Random(2024)
        def q2(q):
            return qrf(*qrf(*q))
        n, tot, tot2 = 200000, 0, 0
        for _ in range(n):
            x = [rng.getrandbits(32) for _ in range(4)]
            y, y2 = q2(x), q2([x[0] ^ 1, x[1], x[2], x[3]])
            w = sum(bin(u ^ v).count("1") for u, v in zip(y, y2))
            tot += w; tot2 += w * w
        mean = tot / n
        sd = (tot2 / n - mean * mean) ** 0.5
        print("round-2 weight, delta=(1,0,0,0): mean %.4f sd %.4f (n=%d)" % (mean, sd, n))
        n, words = 20000, [0] * 4
        for _ in range(n):
            x = [rng.getrandbits(32) for _ in range(4)]
            y = q2(x)
            for i in range(128):
                xx = list(x); xx[i // 32] ^= 1 << (i % 32)
                yy = q2(xx)
                for w in range(4):
                    words[w] += bin(y[w] ^ yy[w]).count("1")
        print("2-round avalanche word means:", " ".join("%.4f" % (v / (n * 128 * 32)) for v in words))
