"""Text format for signatures and algebras.

    signature
      <name> <arity>
    algebra <name>
      size <k>
      op <name>
      <k^arity integers, row-major, last argument fastest>

``#`` starts a comment.  A file may hold several algebra blocks; several
files may be read together as long as their signatures agree.
"""

from __future__ import annotations

from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .algebra import FiniteAlgebra, Signature
from .errors import ParseError

KEYWORDS = {"signature", "algebra", "size", "op"}


def _tokens(text: str) -> list[tuple[str, int]]:
    out = []
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0]
        out.extend((tok, lineno) for tok in line.split())
    return out


def parse_algebras(text: str, source: str | None = None,
                   signature: Signature | None = None) -> tuple[Signature, list[FiniteAlgebra]]:
    toks = _tokens(text)
    i = 0
    sig = None
    algs: list[FiniteAlgebra] = []

    def err(msg, line=None):
        if line is None:
            line = toks[i][1] if i < len(toks) else (toks[-1][1] if toks else 1)
        return ParseError(msg, source, line)

    def int_token(what):
        nonlocal i
        if i >= len(toks):
            raise err(f"expected {what}, found end of input")
        tok, line = toks[i]
        try:
            v = int(tok)
        except ValueError:
            raise err(f"expected {what}, found {tok!r}", line) from None
        i += 1
        return v

    while i < len(toks):
        tok, line = toks[i]
        if tok == "signature":
            if sig is not None:
                raise err("second signature block", line)
            i += 1
            pairs = []
            while i < len(toks) and toks[i][0] not in KEYWORDS:
                name, nl = toks[i]
                i += 1
                ar = int_token(f"arity of {name}")
                if ar < 0:
                    raise err(f"negative arity for {name}", nl)
                pairs.append((name, ar))
            try:
                sig = Signature(tuple(pairs))
            except Exception as e:
                raise err(str(e), line) from None
            if signature is not None and sig != signature:
                raise err(f"signature [{sig}] differs from earlier [{signature}]", line)
        elif tok == "algebra":
            if sig is None:
                sig = signature
            if sig is None:
                raise err("algebra block before any signature", line)
            i += 1
            if i >= len(toks) or toks[i][0] in KEYWORDS:
                raise err("algebra needs a name", line)
            name = toks[i][0]
            i += 1
            if i >= len(toks) or toks[i][0] != "size":
                raise err(f"expected 'size' after algebra {name}")
            i += 1
            k = int_token("algebra size")
            if k < 1:
                raise err(f"size of {name} must be positive")
            tables: dict[str, np.ndarray] = {}
            while i < len(toks) and toks[i][0] == "op":
                opline = toks[i][1]
                i += 1
                if i >= len(toks):
                    raise err("op needs a symbol name", opline)
                op = toks[i][0]
                if op not in sig:
                    raise err(f"unknown symbol {op!r} in algebra {name}", opline)
                if op in tables:
                    raise err(f"second table for {op} in algebra {name}", opline)
                i += 1
                ar = sig.arity(op)
                vals = [int_token(f"entry of {op}") for _ in range(k**ar)]
                bad = [v for v in vals if not 0 <= v < k]
                if bad:
                    raise err(f"entry {bad[0]} of {op} outside 0..{k - 1}")
                tables[op] = np.array(vals, dtype=np.int64).reshape((k,) * ar)
            missing = [n for n in sig.names if n not in tables]
            if missing:
                raise err(f"algebra {name} lacks tables for {', '.join(missing)}", line)
            algs.append(FiniteAlgebra(sig, k, tables, name))
        else:
            raise err(f"unexpected {tok!r}", line)
    if sig is None:
        sig = signature
    if sig is None:
        raise ParseError("no signature declared", source, 1)
    return sig, algs


def read_algebras(paths: Sequence[str | Path]) -> tuple[Signature, list[FiniteAlgebra]]:
    sig = None
    algs: list[FiniteAlgebra] = []
    for p in paths:
        try:
            text = Path(p).read_text()
        except OSError as e:
            raise ParseError(f"cannot read file: {e.strerror}", str(p)) from None
        sig, more = parse_algebras(text, str(p), sig)
        algs.extend(more)
    if sig is None:
        raise ParseError("no input files")
    return sig, algs


def format_signature(sig: Signature) -> str:
    lines = ["signature"]
    lines += [f"  {n} {a}" for n, a in sig]
    return "\n".join(lines) + "\n"


def format_algebra(A: FiniteAlgebra) -> str:
    lines = [f"algebra {A.name.replace(' ', '_') or 'A'}", f"  size {A.size}"]
    for (name, ar), t in zip(A.signature, A.tables):
        lines.append(f"  op {name}")
        if ar == 0:
            lines.append(f"    {int(t)}")
        else:
            for row in np.asarray(t).reshape(-1, A.size):
                lines.append("    " + " ".join(str(int(v)) for v in row))
    return "\n".join(lines) + "\n"


def format_algebras(algs: Iterable[FiniteAlgebra], signature: Signature | None = None) -> str:
    algs = list(algs)
    sig = signature or (algs[0].signature if algs else None)
    if sig is None:
        raise ValueError("nothing to format")
    return format_signature(sig) + "".join(format_algebra(A) for A in algs)
