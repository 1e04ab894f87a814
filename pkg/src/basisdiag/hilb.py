"""Dense tensor semantics for diagrams.

``evaluate(f, interp)`` returns a complex array whose axes are the output
wires of ``f`` followed by its input wires, in boundary order.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

from . import diagram as dg
from . import structures as st
from .diagram import BOUNDARY, Diagram, Generator, Kind, Port, WireType
from .errors import ShapeMismatch, UnknownBox, UnknownObject

ComplexTensor = np.ndarray


def as_tensor(data, shape: Sequence[int] | None = None) -> ComplexTensor:
    """Validate and convert to a finite complex128 array."""
    a = np.asarray(data, dtype=np.complex128)
    if shape is not None:
        shape = tuple(shape)
        if a.size != int(np.prod(shape, dtype=int)):
            raise ShapeMismatch(f"{a.size} entries cannot fill shape {shape}")
        a = a.reshape(shape)
    if not np.all(np.isfinite(a)):
        raise ValueError("tensor contains NaN or Inf")
    return a


@dataclass
class Interpretation:
    """Basis structures per object, plain box tensors and box tags."""

    structures: dict[str, st.BasisStructure] = field(default_factory=dict)
    boxes: dict[str, ComplexTensor] = field(default_factory=dict)
    tags: dict[str, set[str]] = field(default_factory=dict)

    def __post_init__(self):
        self._duals: dict[str, st.BasisStructure] = {}

    @property
    def object_dims(self) -> dict[str, int]:
        return {o: s.dim for o, s in self.structures.items()}

    def dim(self, t: WireType | str) -> int:
        obj = t.object if isinstance(t, WireType) else t
        try:
            return self.structures[obj].dim
        except KeyError:
            raise UnknownObject(f"object {obj!r} has no structure in the interpretation") from None

    def structure(self, t: WireType) -> st.BasisStructure:
        self.dim(t)
        s = self.structures[t.object]
        if not t.dualized:
            return s
        if t.object not in self._duals:
            self._duals[t.object] = st.dual_structure(s)
        return self._duals[t.object]

    def epsilon(self, obj: str) -> np.ndarray:
        self.dim(obj)
        return st.epsilon_from_dualiser(self.structures[obj])

    def box_tensor(self, name: str, dom: Sequence[WireType], cod: Sequence[WireType]) -> ComplexTensor:
        if name not in self.boxes:
            raise UnknownBox(f"box {name!r} has no tensor in the interpretation")
        shape = [self.dim(t) for t in cod] + [self.dim(t) for t in dom]
        data = np.asarray(self.boxes[name], dtype=np.complex128)
        if data.size != int(np.prod(shape, dtype=int)):
            raise ShapeMismatch(f"box {name!r} holds {data.size} entries, signature needs {shape}")
        return data.reshape(shape)

    def with_box(self, name: str, tensor, tags: Iterable[str] = ()) -> "Interpretation":
        boxes = dict(self.boxes)
        boxes[name] = as_tensor(tensor)
        all_tags = {k: set(v) for k, v in self.tags.items()}
        if tags:
            all_tags.setdefault(name, set()).update(tags)
        return Interpretation(dict(self.structures), boxes, all_tags)


def qubit_interpretation(basis: str = "Z", obj: str = "A", **boxes) -> Interpretation:
    return Interpretation({obj: st.builtin(basis)}, {k: as_tensor(v) for k, v in boxes.items()})


# --------------------------------------------------------- generator data


def _fan(s: st.BasisStructure, n: int) -> np.ndarray:
    """Iterated copy ``A -> A^n`` with axes [o1..on, i], for ``n >= 1``."""
    t = np.eye(s.dim, dtype=np.complex128)
    for _ in range(n - 1):
        t = np.tensordot(s.delta, t, axes=([2], [0]))
    return t


def _spider_tensor(s: st.BasisStructure, n_in: int, n_out: int) -> np.ndarray:
    """Spider with all legs on ``A``, axes [outs..., ins...]."""
    top = _fan(s, n_out) if n_out else s.gamma
    if n_in:
        f = _fan(s, n_in)
        bottom = np.moveaxis(f.conj(), f.ndim - 1, 0)
    else:
        bottom = s.gamma.conj()
    return np.tensordot(top, bottom, axes=([top.ndim - 1], [0]))


def generator_tensor(g: Generator, interp: Interpretation) -> np.ndarray:
    """Tensor of one generator, axes ordered outputs then inputs."""
    k = g.kind
    if k is Kind.SCALAR:
        if g.name == "dim":
            return np.asarray(complex(interp.dim(g.wire)))
        return np.asarray(complex(g.value))
    if k is Kind.BOX:
        T = interp.box_tensor(g.name, g.dom, g.cod)
        n_out, n_in = len(g.cod), len(g.dom)
        if g.variant == "plain":
            return T
        if g.variant == "dagger":
            return np.transpose(T.conj(), list(range(n_out, n_out + n_in)) + list(range(n_out)))
        if g.variant == "transpose":
            return np.transpose(T, list(range(T.ndim))[::-1])
        return np.transpose(T.conj(), list(range(n_out))[::-1] + list(range(n_out, n_out + n_in))[::-1])
    if k is Kind.SPIDER:
        base = interp.structure(g.wire)
        T = _spider_tensor(base, len(g.dom), len(g.cod))
        d = base.dualiser
        n_out = len(g.cod)
        for pos, t in enumerate(g.cod):
            if t.dualized:
                T = np.moveaxis(np.tensordot(d, T, axes=([1], [pos])), 0, pos)
        dd = d.conj().T
        for j, t in enumerate(g.dom):
            if t.dualized:
                pos = n_out + j
                T = np.moveaxis(np.tensordot(T, dd, axes=([pos], [0])), T.ndim - 1, pos)
        return T
    x = g.wire
    if k is Kind.CAP:
        eps = interp.epsilon(x.object)
        return eps if not x.dualized else eps.T
    if k is Kind.CUP:
        eps = interp.epsilon(x.object)
        cap_dual = eps.T if not x.dualized else eps  # Cap(X*)
        return cap_dual.conj()
    s = interp.structure(x)
    if k is Kind.DELTA:
        return s.delta
    if k is Kind.DELTA_DAGGER:
        return np.transpose(s.delta.conj(), (2, 0, 1))
    if k is Kind.GAMMA:
        return s.gamma
    if k is Kind.GAMMA_DAGGER:
        return s.gamma.conj()
    if k is Kind.DUALISER:
        return s.dualiser
    if k is Kind.DUALISER_DAGGER:
        return s.dualiser.conj().T
    raise ValueError(f"no semantics for generator kind {k}")


# ------------------------------------------------------------ contraction


def _network(f: Diagram, interp: Interpretation):
    """Tensors with integer axis labels, plus the output label order."""
    labels: dict = {}
    for i, e in enumerate(sorted(f.edges)):
        labels[e] = i
    nxt = len(labels)
    tensors: list[tuple[np.ndarray, list[int]]] = []
    for nid in sorted(f.nodes):
        g = f.nodes[nid]
        ins, outs = g.signature()
        T = generator_tensor(g, interp)
        axes = [labels[f.edge_at(Port(nid, "out", i))] for i in range(len(outs))]
        axes += [labels[f.edge_at(Port(nid, "in", i))] for i in range(len(ins))]
        if T.ndim != len(axes):
            raise ShapeMismatch(f"generator {g} has {T.ndim} axes, expected {len(axes)}")
        tensors.append((T, axes))
    out_labels = []
    for i in range(len(f.cod)):
        e = f.edge_at(Port(BOUNDARY, "out", i))
        out_labels.append(labels[e])
    in_labels = []
    for i in range(len(f.dom)):
        e = f.edge_at(Port(BOUNDARY, "in", i))
        if e.tgt.node == BOUNDARY:
            # a bare wire: give the input side its own label joined by an identity
            tensors.append((np.eye(interp.dim(e.wire), dtype=np.complex128), [labels[e], nxt]))
            in_labels.append(nxt)
            nxt += 1
        else:
            in_labels.append(labels[e])
    return tensors, out_labels + in_labels


def _contract_pair(a, b):
    (ta, la), (tb, lb) = a, b
    shared = [x for x in la if x in lb]
    ia = [la.index(x) for x in shared]
    ib = [lb.index(x) for x in shared]
    t = np.tensordot(ta, tb, axes=(ia, ib))
    rest = [x for x in la if x not in shared] + [x for x in lb if x not in shared]
    return t, rest


def _result_size(a, b, dims: dict[int, int]) -> int:
    la, lb = a[1], b[1]
    rest = set(la) ^ set(lb)
    return int(np.prod([dims[x] for x in rest], dtype=np.int64)) if rest else 1


def contract(tensors: list, out_labels: list[int], order: str = "greedy") -> np.ndarray:
    """Contract a labelled network; ``order`` is ``greedy`` or ``sequential``."""
    dims: dict[int, int] = {}
    for T, ls in tensors:
        for ax, x in enumerate(ls):
            dims[x] = T.shape[ax]
    work = list(tensors)
    if not work:
        return np.asarray(1.0 + 0j)
    if order == "sequential":
        acc = work[0]
        for item in work[1:]:
            acc = _contract_pair(acc, item)
        work = [acc]
    while len(work) > 1:
        best = None
        for i in range(len(work)):
            for j in range(i + 1, len(work)):
                connected = bool(set(work[i][1]) & set(work[j][1]))
                key = (not connected, _result_size(work[i], work[j], dims), i, j)
                if best is None or key < best[0]:
                    best = (key, i, j)
        _, i, j = best
        merged = _contract_pair(work[i], work[j])
        work = [w for k, w in enumerate(work) if k not in (i, j)] + [merged]
    T, ls = work[0]
    if sorted(ls) != sorted(out_labels):
        raise ShapeMismatch("dangling labels left after contraction")
    return np.transpose(T, [ls.index(x) for x in out_labels]) if ls else T


def evaluate(f: Diagram, interp: Interpretation, order: str = "greedy") -> ComplexTensor:
    """Interpret ``f``; axes are outputs then inputs."""
    tensors, out_labels = _network(f, interp)
    return np.asarray(contract(tensors, out_labels, order), dtype=np.complex128)


def as_matrix(t: np.ndarray, f: Diagram, interp: Interpretation) -> np.ndarray:
    rows = int(np.prod([interp.dim(x) for x in f.cod], dtype=int))
    cols = int(np.prod([interp.dim(x) for x in f.dom], dtype=int))
    return np.asarray(t).reshape(rows, cols)


def evaluate_matrix(f: Diagram, interp: Interpretation) -> np.ndarray:
    return as_matrix(evaluate(f, interp), f, interp)


def tensor_dagger(t: np.ndarray, n_out: int) -> np.ndarray:
    """Swap the output and input axis groups and conjugate."""
    n_in = t.ndim - n_out
    return np.transpose(t.conj(), list(range(n_out, n_out + n_in)) + list(range(n_out)))


# -------------------------------------------------------------- comparison


def equal(a, b, tol: float = st.TOL) -> bool:
    return st.max_dev(a, b) <= tol


def equal_upto_scalar(a, b, tol: float = st.TOL) -> tuple[bool, complex]:
    """Least-squares ``c`` with ``a ~ c b``, and whether the fit is within ``tol``."""
    a = np.asarray(a, dtype=np.complex128)
    b = np.asarray(b, dtype=np.complex128)
    if a.shape != b.shape:
        raise ShapeMismatch(f"cannot compare shapes {a.shape} and {b.shape}")
    nb = np.vdot(b, b)
    c = complex(np.vdot(b, a) / nb) if abs(nb) > 0 else 0j
    return st.max_dev(a, c * b) <= tol, c


# ---------------------------------------------------------------- sampling


def random_unitary(dim: int, seed: int) -> np.ndarray:
    if dim < 1:
        raise ValueError("dim must be positive")
    rng = np.random.default_rng(seed)
    z = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    q, r = np.linalg.qr(z)
    phases = np.diag(r) / np.abs(np.diag(r))
    return q * phases


def random_orthogonal(dim: int, seed: int) -> np.ndarray:
    rng = np.random.default_rng(seed)
    q, r = np.linalg.qr(rng.normal(size=(dim, dim)))
    return (q * np.sign(np.diag(r))).astype(np.complex128)


def random_matrix(shape: Sequence[int], seed: int) -> np.ndarray:
    rng = np.random.default_rng(seed)
    return rng.normal(size=shape) + 1j * rng.normal(size=shape)


DEFAULT_FREQUENCIES = {
    Kind.DELTA: 3, Kind.DELTA_DAGGER: 3, Kind.GAMMA: 1, Kind.GAMMA_DAGGER: 1,
    Kind.DUALISER: 1, Kind.DUALISER_DAGGER: 1, Kind.CAP: 1, Kind.CUP: 1,
}


def _attempt(rng: random.Random, objects, freqs, boxes, max_nodes, max_ports) -> Diagram | None:
    n_in = rng.randint(0, min(2, max_ports))
    dom = [WireType(rng.choice(objects), rng.random() < 0.25) for _ in range(n_in)]
    d = dg.identity(dom)
    choices = [(k, w) for k, w in freqs.items()] + [(("box", b), 2) for b in boxes]
    target_nodes = rng.randint(1, max_nodes)
    for _ in range(target_nodes * 4):
        if len(d.nodes) >= target_nodes:
            break
        frontier = list(d.cod)
        kind = rng.choices([c for c, _ in choices], weights=[w for _, w in choices])[0]
        if isinstance(kind, tuple):
            name, bdom, bcod = kind[1]
            gen = Generator(Kind.BOX, None, name, "plain", dg.wires(bdom), dg.wires(bcod))
        elif kind in (Kind.GAMMA_DAGGER, Kind.CUP) or not frontier:
            if kind not in (Kind.GAMMA_DAGGER, Kind.CUP):
                continue
            gen = Generator(kind, WireType(rng.choice(objects), rng.random() < 0.3))
        else:
            x = rng.choice(frontier)
            if kind is Kind.DUALISER_DAGGER:
                x = x.dual
            gen = Generator(kind, x)
        ins, _ = gen.signature()
        taken: list[int] = []
        for t in ins:
            spots = [i for i, u in enumerate(frontier) if u == t and i not in taken]
            if not spots:
                taken = None
                break
            taken.append(rng.choice(spots))
        if taken is None:
            continue
        rest = [i for i in range(len(frontier)) if i not in taken]
        perm = [0] * len(frontier)
        for pos, i in enumerate(taken + rest):
            perm[i] = pos
        step = dg.then(dg.permutation(frontier, perm),
                       dg.tensor(dg.from_generator(gen), dg.identity([frontier[i] for i in rest])))
        d = dg.then(d, step)
        if len(d.cod) > max_ports + 2:
            return None
    if len(d.dom) + len(d.cod) > max_ports or not d.nodes:
        return None
    # shuffle the outputs so wiring is not always block-ordered
    out_perm = list(range(len(d.cod)))
    rng.shuffle(out_perm)
    return dg.then(d, dg.permutation(d.cod, out_perm))


def random_diagram(seed: int, max_nodes: int = 8, max_ports: int = 6, connected: bool = True,
                   objects: Sequence[str] = ("A",), frequencies: Mapping | None = None,
                   boxes: Sequence[tuple] = ()) -> Diagram:
    """A valid random diagram, deterministic in ``seed``.

    ``frequencies`` weights the structural generator kinds; each entry of
    ``boxes`` is ``(name, dom, cod)`` and is drawn like another kind.
    """
    rng = random.Random(seed)
    freqs = dict(DEFAULT_FREQUENCIES if frequencies is None else frequencies)
    for _ in range(10000):
        d = _attempt(rng, list(objects), freqs, list(boxes), max_nodes, max_ports)
        if d is None:
            continue
        if connected and not dg.is_connected(d):
            continue
        return dg.check(d)
    raise RuntimeError("could not sample a diagram with the requested constraints")
