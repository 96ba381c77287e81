"""Compare the compiled and pure-Python formula tokenizers.

    python3 benchmarks/bench_lexer.py --formulas 2000 --repeat 5
"""

import argparse
import random
import sys
import timeit

from nestedif import lexer

ALLOCATION = (
    '=IF(B10="Rev", B14*B15/B16, IF(B10="Units", B14*B17/B18, IF(B10="MH", B14*B19/B20, '
    'IF(B10="MC", B14*B21/B22, IF(B11="", "", "not correct Alloc.")))))'
)


def make_corpus(n, seed):
    rng = random.Random(seed)
    pieces = ["A1", "$B$10", "'My Data'!C3", "SUM(A1:A20)", '"text"', "3.25", "1e-3", "TRUE"]
    ops = ["+", "-", "*", "/", "&", "=", "<>", "<=", "^"]
    corpus = [ALLOCATION.encode()]
    while len(corpus) < n:
        terms = [rng.choice(pieces) for _ in range(rng.randint(3, 30))]
        body = terms[0]
        for t in terms[1:]:
            body = f"{body}{rng.choice(ops)}{t}"
        if rng.random() < 0.5:
            body = f"IF({body}>0, {rng.choice(pieces)}, {body})"
        corpus.append(("=" + body).encode())
    return corpus


def bench(fn, corpus, repeat):
    def run():
        for data in corpus:
            fn(data)

    return min(timeit.repeat(run, number=1, repeat=repeat))


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--formulas", type=int, default=2000)
    p.add_argument("--repeat", type=int, default=5)
    p.add_argument("--seed", type=int, default=7)
    args = p.parse_args(argv)

    corpus = make_corpus(args.formulas, args.seed)
    total = sum(len(d) for d in corpus)
    print(f"{len(corpus)} formulas, {total / 1024:.1f} KiB, active backend: {lexer.BACKEND}")

    py = bench(lexer.tokenize_py, corpus, args.repeat)
    print(f"python  {py * 1e3:9.2f} ms  {total / py / 2**20:7.1f} MiB/s")
    if lexer.tokenize_ext is None:
        print("compiled extension not built; rebuild with `pip install -e . --no-build-isolation`")
        return 0
    for data in corpus:
        if lexer.tokenize_ext(data) != lexer.tokenize_py(data):
            print("backends disagree on", data, file=sys.stderr)
            return 1
    ext = bench(lexer.tokenize_ext, corpus, args.repeat)
    print(f"cython  {ext * 1e3:9.2f} ms  {total / ext / 2**20:7.1f} MiB/s")
    print(f"speedup {py / ext:.1f}x")
    return 0


if __name__ == "__main__":
    sys.exit(main())
