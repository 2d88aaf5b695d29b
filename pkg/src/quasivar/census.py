"""Census of small single-operation algebras: structural completeness statistics."""

from __future__ import annotations

import itertools
import json
import multiprocessing
import signal
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Iterator

import numpy as np

from .admissibility import adm_algs
from .algebra import FiniteAlgebra, Signature, generator_count, minimal_subalgebra, product
from .errors import QuasivarError, ResourceError
from .free import DEFAULT_MAX_ENTRIES, free_algebra
from .mingen import EmbeddingCache, min_gen_set

ENUMERATION_CAP = 50_000_000


def _signature(arity: int) -> Signature:
    return Signature.of(("f", arity))


def enumerate_groupoids(size: int, arity: int = 2, cap: int = ENUMERATION_CAP) -> list[FiniteAlgebra]:
    """One algebra per isomorphism class, each in canonical (lex-least) form, in lex order."""
    if size < 1:
        raise ValueError("size must be positive")
    k, cells = size, size**arity
    total = k**cells
    if total > cap:
        raise ResourceError("enumeration cap", cap, total, f"{k}-element arity-{arity} tables")
    perms = np.array(list(itertools.permutations(range(k))), dtype=np.int64)
    if cells * np.log2(max(k, 2)) > 62:
        raise ResourceError("enumeration cap", cap, total, "table codes exceed 64 bits")
    weights = k ** np.arange(cells - 1, -1, -1, dtype=np.int64)
    # cell c of a permuted table reads the original at the inverse-permuted argument tuple
    cell_args = np.indices((k,) * arity).reshape(arity, -1).T
    chunk = max(1, (1 << 22) // cells)
    canon = []
    for start in range(0, total, chunk):
        codes = np.arange(start, min(total, start + chunk), dtype=np.int64)
        tables = (codes[:, None] // weights[None, :]) % k
        best = None
        for p in perms:
            inv = np.argsort(p)
            src = np.ravel_multi_index(tuple(inv[cell_args].T), (k,) * arity) if arity else np.zeros(1, np.int64)
            permuted = p[tables[:, src]]
            c = permuted @ weights
            best = c if best is None else np.minimum(best, c)
        canon.append(best)
    classes = np.unique(np.concatenate(canon))
    sig = _signature(arity)
    out = []
    for i, code in enumerate(classes.tolist()):
        table = (code // weights) % k
        out.append(FiniteAlgebra(sig, k, [table.reshape((k,) * arity)], f"G{k}_{i}"))
    return out


@dataclass
class ClassRecord:
    index: int
    table: tuple[int, ...]
    status: str = "ok"
    generators: int = 0
    free_size: int = 0
    mingen_sizes: tuple[int, ...] = ()
    sc: bool = False
    asc: bool = False
    basis_sizes: tuple[int, ...] | None = None

    def to_line(self) -> str:
        d = {
            "i": self.index,
            "table": "".join(map(str, self.table)),
            "status": self.status,
            "m": self.generators,
            "free": self.free_size,
            "mingen": list(self.mingen_sizes),
            "sc": int(self.sc),
            "asc": int(self.asc),
            "basis": None if self.basis_sizes is None else list(self.basis_sizes),
        }
        return json.dumps(d, separators=(",", ":"))

    @classmethod
    def from_line(cls, line: str) -> ClassRecord:
        d = json.loads(line)
        return cls(
            index=d["i"],
            table=tuple(int(c) for c in d["table"]),
            status=d["status"],
            generators=d["m"],
            free_size=d["free"],
            mingen_sizes=tuple(d["mingen"]),
            sc=bool(d["sc"]),
            asc=bool(d["asc"]),
            basis_sizes=None if d["basis"] is None else tuple(d["basis"]),
        )


@dataclass
class CensusReport:
    class_count: int
    sc_count: int
    asc_only_count: int
    min_free_size: int | None
    max_free_size: int | None
    max_generator_algebra_size: int | None
    skipped: int = 0
    records: list[ClassRecord] = field(default_factory=list)

    def summary(self) -> str:
        return "\n".join([
            f"classes {self.class_count}",
            f"structurally complete {self.sc_count}",
            f"almost structurally complete (not structurally complete) {self.asc_only_count}",
            f"free algebra sizes {self.min_free_size}..{self.max_free_size}",
            f"largest generating algebra {self.max_generator_algebra_size}",
            f"skipped {self.skipped}",
        ])


def classify(A: FiniteAlgebra, index: int = 0, full_admalgs: bool = False,
             max_entries: int = DEFAULT_MAX_ENTRIES) -> ClassRecord:
    """SC/ASC verdicts for a single algebra, plus the sizes of a generating set of Q(F(omega)).

    For SC the generating set is the minimal generating set of A; for ASC
    it is that of A x B with B smallest in F(omega); otherwise (or with
    ``full_admalgs``) it comes from the admissibility basis.
    """
    rec = ClassRecord(index, tuple(int(v) for v in A.tables[0].ravel()))
    cache = EmbeddingCache()
    m = generator_count(A)
    if m == 0 and not A.signature.has_constants():
        m = 1
    rec.generators = m
    F = free_algebra([A], m, max_entries)
    rec.free_size = F.size
    D = min_gen_set([A], cache)
    rec.mingen_sizes = tuple(sorted(B.size for B in D))
    rec.sc = all(cache.embeds(B, F.base) for B in D)
    basis = list(rec.mingen_sizes) if rec.sc else None
    if not rec.sc:
        F1 = F if m == 1 else free_algebra([A], 1, max_entries)
        small = minimal_subalgebra(F1.base)
        D2 = min_gen_set([product([A, small])], cache)
        rec.asc = all(cache.embeds(B, F.base) for B in D2)
        if rec.asc:
            basis = sorted(B.size for B in D2)
    else:
        rec.asc = True
    if full_admalgs or basis is None:
        basis = sorted(B.size for B in adm_algs([A], max_entries, cache).basis)
    rec.basis_sizes = tuple(basis)
    return rec


class _Timeout(Exception):
    pass


def _alarm(signum, frame):
    raise _Timeout()


def _work(args) -> str:
    index, table, size, arity, full, max_entries, timeout = args
    A = FiniteAlgebra(_signature(arity), size, [np.asarray(table).reshape((size,) * arity)], f"G{size}_{index}")
    if timeout:
        signal.signal(signal.SIGALRM, _alarm)
    try:
        if timeout:
            signal.setitimer(signal.ITIMER_REAL, timeout)
        rec = classify(A, index, full, max_entries)
    except _Timeout:
        rec = ClassRecord(index, tuple(table), status="skipped:timeout")
    except ResourceError as e:
        rec = ClassRecord(index, tuple(table), status=f"skipped:{e.cap.replace(' ', '_')}")
    except QuasivarError as e:
        rec = ClassRecord(index, tuple(table), status=f"error:{type(e).__name__}")
    finally:
        if timeout:
            signal.setitimer(signal.ITIMER_REAL, 0)
    return rec.to_line()


def read_records(path: str | Path) -> dict[int, ClassRecord]:
    """Complete records from a (possibly truncated) record file."""
    out: dict[int, ClassRecord] = {}
    p = Path(path)
    if not p.exists():
        return out
    for line in p.read_text().splitlines():
        line = line.strip()
        if not line:
            continue
        try:
            rec = ClassRecord.from_line(line)
        except (ValueError, KeyError):
            continue  # a partly written final line
        out[rec.index] = rec
    return out


def summarize(records: Iterable[ClassRecord]) -> CensusReport:
    recs = sorted(records, key=lambda r: r.index)
    ok = [r for r in recs if r.status == "ok"]
    frees = [r.free_size for r in ok]
    gens = [s for r in ok for s in (r.basis_sizes or ())]
    return CensusReport(
        class_count=len(recs),
        sc_count=sum(r.sc for r in ok),
        asc_only_count=sum(r.asc and not r.sc for r in ok),
        min_free_size=min(frees, default=None),
        max_free_size=max(frees, default=None),
        max_generator_algebra_size=max(gens, default=None),
        skipped=len(recs) - len(ok),
        records=recs,
    )


def run_census(size: int = 3, arity: int = 2, full_admalgs: bool = False, out: str | Path | None = None,
               resume: str | Path | None = None, jobs: int = 1, timeout: float | None = None,
               max_entries: int = DEFAULT_MAX_ENTRIES, limit: int | None = None) -> CensusReport:
    """Classify every isomorphism class; records stream to ``out`` as they finish.

    Records already present in ``resume`` are reused.  When ``out`` equals
    ``resume`` the file is rewritten with the kept records first.
    """
    algs = enumerate_groupoids(size, arity)
    if limit is not None:
        algs = algs[:limit]
    done = read_records(resume) if resume else {}
    expected = {i: tuple(int(v) for v in A.tables[0].ravel()) for i, A in enumerate(algs)}
    done = {i: r for i, r in done.items() if expected.get(i) == r.table}
    todo = [(i, expected[i], size, arity, full_admalgs, max_entries, timeout)
             for i in range(len(algs)) if i not in done]
    sink = None
    if out is not None:
        sink = open(out, "w")
        for i in sorted(done):
            sink.write(done[i].to_line() + "\n")
        sink.flush()
    try:
        results = dict(done)
        for line in _run(todo, jobs):
            rec = ClassRecord.from_line(line)
            results[rec.index] = rec
            if sink:
                sink.write(line + "\n")
                sink.flush()
    finally:
        if sink:
            sink.close()
    return summarize(results.values())


def _run(todo, jobs) -> Iterator[str]:
    if jobs <= 1 or len(todo) <= 1:
        for t in todo:
            yield _work(t)
        return
    with multiprocessing.Pool(jobs) as pool:
        yield from pool.imap(_work, todo, chunksize=4)
