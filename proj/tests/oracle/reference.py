#!/usr/bin/env python3
# Copyright 2026 The ttt-serve Authors. All Rights Reserved.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
# ==============================================================================
"""Independent reference for the frozen values in frozen_oracle.h.

Re-derives token streams, backend arithmetic, event census, version counts
and the cost-model closed forms in plain Python, without touching the C++
sources. Run it and paste its output over frozen_oracle.h when the model
definition changes on purpose.
"""

import hashlib
import struct
import sys

MASK = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15
ETA = 0.01
SALT_A, SALT_B, SALT_OFFSET = 0xA0A0A0A0, 0xB0B0B0B0, 0x0FF5E7


def mix64(z):
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK
    return z ^ (z >> 31)


def unit(seed, a, b, c):
    h = mix64((seed + GOLDEN) & MASK)
    h = mix64(h ^ ((a + GOLDEN) & MASK))
    h = mix64(h ^ ((b + 2 * GOLDEN) & MASK))
    h = mix64(h ^ ((c + 3 * GOLDEN) & MASK))
    return (h >> 11) * 2.0**-53


def token(owner, pos, seed, d):
    return [2.0 * unit(seed, owner, pos, i) - 1.0 for i in range(d)]


class FastWeight:
    def __init__(self, d):
        self.d = d
        self.w = [0.0] * (d * d)

    def read(self, x):
        d = self.d
        y = []
        for i in range(d):
            acc = 0.0
            for j in range(d):
                acc += self.w[i * d + j] * x[j]
            y.append(x[i] + acc)
        return y

    def update(self, m):
        d = self.d
        for i in range(d):
            s = ETA * m[i]
            for j in range(d):
                self.w[i * d + j] += s * m[j]

    def flat(self):
        return list(self.w)


class DeltaAdapter:
    def __init__(self, d, r, owner, seed):
        self.d, self.r = d, r
        self.a = [0.1 * (2.0 * unit(seed, owner, SALT_A, i) - 1.0) for i in range(r * d)]
        self.b = [0.1 * (2.0 * unit(seed, owner, SALT_B, i) - 1.0) for i in range(r * d)]

    def read(self, x):
        d, r = self.d, self.r
        t = []
        for k in range(r):
            acc = 0.0
            for j in range(d):
                acc += self.a[k * d + j] * x[j]
            t.append(acc)
        y = []
        for j in range(d):
            acc = 0.0
            for k in range(r):
                acc += self.b[k * d + j] * t[k]
            y.append(x[j] + acc)
        return y

    def update(self, m):
        d = self.d
        new = list(self.a)
        for k in range(self.r):
            am = 0.0
            for j in range(d):
                am += self.a[k * d + j] * m[j]
            s = ETA * am
            for j in range(d):
                new[k * d + j] += s * m[j]
        self.a = new

    def flat(self):
        return self.a + self.b


def mean(tokens):
    d = len(tokens[0])
    s = [0.0] * d
    for t in tokens:
        for i in range(d):
            s[i] += t[i]
    n = float(len(tokens))
    return [v / n for v in s]


def sha(values):
    h = hashlib.sha256()
    for v in values:
        h.update(struct.pack("<d", v))
    return h.hexdigest()


def run_stream(owner, prompt, decode, chunk, offset, backend, d, r, seed):
    state = FastWeight(d) if backend == "fw" else DeltaAdapter(d, r, owner, seed)
    tail = [token(owner, p, seed, d) for p in range(prompt - offset, prompt)]
    outputs, version, reads, writes = [], 0, 0, 0
    for q in range(1, decode + 1):
        x = token(owner, prompt + q - 1, seed, d)
        outputs.extend(state.read(x))
        tail.append(x)
        if len(tail) == chunk:
            state.update(mean(tail))
            tail = []
            version += 1
            writes += 1
        else:
            reads += 1
    return {"out": sha(outputs), "payload": sha(state.flat()), "version": version,
            "reads": reads, "writes": writes}


def trace(pattern, streams=8, prompt=4096, decode=512, chunk=128, seed=0):
    if pattern == "all-update":
        chunk = 1
    rows = []
    for sid in range(1, streams + 1):
        off = 0
        if pattern == "bursty":
            off = min(int(unit(seed, sid, SALT_OFFSET, 0) * chunk), min(chunk - 1, prompt))
        rows.append((sid, prompt, decode, chunk, off))
    return rows


def emit_case(name, pattern, backend, seed=0):
    rows = [run_stream(sid, p, dl, c, off, backend, 8, 4, seed)
            for sid, p, dl, c, off in trace(pattern, seed=seed)]
    print(f"inline constexpr FrozenCase k{name}{{")
    print(f"    {sum(x['reads'] for x in rows)}, {sum(x['writes'] for x in rows)},")
    print("    {{")
    for x in rows:
        print(f"        {{{x['version']}, \"{x['out']}\",")
        print(f"         \"{x['payload']}\"}},")
    print("    }}};")
    print()


def closed_forms():
    L, R, W, C, U, P = 1.0, 0.1, 0.2, 0.05, 0.002, 0.01
    n, prompt, decode, chunk = 8, 4096, 512, 128
    iters = 1 + decode
    writes_per = decode // chunk
    reads_per = decode - writes_per

    def serial(k):
        return (iters * P + k * (L + prompt * U) + k * reads_per * (L + R)
                + k * writes_per * (L + W + C))

    full = (iters * P + (L + n * prompt * U) + reads_per * (L + n * R)
            + writes_per * (L + n * (W + C)))
    phase = (iters * P + (L + n * prompt * U) + reads_per * (L + n * R)
             + n * writes_per * (L + W + C))
    replicas = serial(3)
    return serial(n), replicas, phase, full


def main():
    print("// Generated by tests/oracle/reference.py. Do not edit by hand.")
    print()
    emit_case("UniformFastWeight", "uniform", "fw")
    emit_case("UniformDeltaAdapter", "uniform", "da")
    emit_case("BurstyFastWeight", "bursty", "fw")
    emit_case("AllUpdateFastWeight", "all-update", "fw")
    s, rep, ph, f = closed_forms()
    print(f"inline constexpr double kSerialTime = {s!r};")
    print(f"inline constexpr double kReplicasTime = {rep!r};")
    print(f"inline constexpr double kPhaseGroupingTime = {ph!r};")
    print(f"inline constexpr double kFullTime = {f!r};")
    return 0


if __name__ == "__main__":
    sys.exit(main())
