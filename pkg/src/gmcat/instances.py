"""Named instances and deterministic random generators for law batteries."""

from __future__ import annotations

import random

from .finset import Fin, atom, table_map
from .spaneq import Span


def random_fin(rng: random.Random, prefix: str, max_size: int = 4, min_size: int = 1) -> Fin:
    k = rng.randint(min_size, max_size)
    return Fin(atom(f"{prefix}{i}") for i in range(k))


def random_table(rng: random.Random, dom: Fin, cod: Fin):
    return table_map(dom, cod, {e: rng.choice(cod.elems) for e in dom.elems})


def random_span(rng: random.Random, source: Fin, target: Fin, prefix: str,
                max_apex: int = 5, min_apex: int = 0) -> Span:
    apex = Fin(atom(f"{prefix}{i}") for i in range(rng.randint(min_apex, max_apex)))
    return Span(source, target, apex,
                random_table(rng, apex, source), random_table(rng, apex, target))


def random_chain(rng: random.Random, n: int, tag: str, max_obj: int = 3,
                 max_apex: int = 4):
    """A composable chain of n random finite spans."""
    objs = [random_fin(rng, f"{tag}x{i}_", max_obj) for i in range(n + 1)]
    return [random_span(rng, objs[i], objs[i + 1], f"{tag}a{i}_", max_apex)
            for i in range(n)]


def random_endospan(rng: random.Random, tag: str, max_obj: int = 3,
                    max_apex: int = 5) -> Span:
    x = random_fin(rng, f"{tag}x", max_obj)
    return random_span(rng, x, x, f"{tag}f", max_apex)


# ---------------------------------------------------------------------------
# Category and multicategory instances


def zmod_category(n: int):
    """One object, n morphisms composing by addition of residues."""
    from .monoids import FiniteCategory

    o = atom("o")
    ms = [atom(f"m{k}") for k in range(n)]
    return FiniteCategory(
        Fin([o]), Fin(ms),
        src={m: o for m in ms}, tgt={m: o for m in ms},
        comp={(ms[i], ms[j]): ms[(i + j) % n] for i in range(n) for j in range(n)},
        ident={o: ms[0]})


def two_object_category():
    """Two objects, a parallel pair twisted by an involution on the source."""
    from .monoids import FiniteCategory

    u, v = atom("u"), atom("v")
    iu, iv, s, f, g = (atom(k) for k in ("iu", "iv", "s", "f", "g"))
    src = {iu: u, iv: v, s: u, f: u, g: u}
    tgt = {iu: u, iv: v, s: u, f: v, g: v}
    comp = {}
    for m in (iu, s, f, g):
        comp[(iu, m)] = m
    comp[(s, iu)] = s
    comp[(f, iv)] = f
    comp[(g, iv)] = g
    comp[(iv, iv)] = iv
    comp[(s, s)] = iu
    comp[(s, f)] = g
    comp[(s, g)] = f
    return FiniteCategory(Fin([u, v]), Fin([iu, iv, s, f, g]),
                          src, tgt, comp, ident={u: iu, v: iv})


def random_preorder_category(rng: random.Random, max_obj: int = 4):
    """Thin category: reflexive-transitively closed random relation."""
    from .monoids import FiniteCategory

    k = rng.randint(2, max_obj)
    objs = [atom(f"p{i}") for i in range(k)]
    rel = {(o, o) for o in objs}
    for _ in range(rng.randint(1, 2 * k)):
        rel.add((rng.choice(objs), rng.choice(objs)))
    changed = True
    while changed:
        changed = False
        for (a, b) in list(rel):
            for (c, d) in list(rel):
                if b == c and (a, d) not in rel:
                    rel.add((a, d))
                    changed = True
    x = Fin(objs)
    names = {p: atom(f"r_{p[0].key}_{p[1].key}") for p in sorted(rel)}
    ms = Fin(names.values())
    src = {names[p]: p[0] for p in rel}
    tgt = {names[p]: p[1] for p in rel}
    comp = {(names[(a, b)], names[(c, d)]): names[(a, d)]
            for (a, b) in rel for (c, d) in rel if b == c}
    ident = {o: names[(o, o)] for o in objs}
    return FiniteCategory(x, ms, src, tgt, comp, ident)


def random_transformation_monoid(rng: random.Random, points: int = 3,
                                 max_mor: int = 10):
    """One-object category of self-maps on a small set, closed under
    composition; regenerates until the closure fits the size cap."""
    from .monoids import FiniteCategory

    idfn = tuple(range(points))
    for _ in range(50):
        gens = {tuple(rng.randrange(points) for _ in range(points))
                for _ in range(rng.randint(1, 2))}
        elems = {idfn} | gens
        frontier = list(elems)
        ok = True
        while frontier:
            h = frontier.pop()
            for g in list(elems):
                for c in (tuple(g[i] for i in h), tuple(h[i] for i in g)):
                    if c not in elems:
                        elems.add(c)
                        frontier.append(c)
            if len(elems) > max_mor:
                ok = False
                break
        if ok:
            break
    else:
        elems = {idfn}
    o = atom("o")
    names = {fn: atom("t" + "".join(map(str, fn))) for fn in elems}
    ms = Fin(names.values())
    # diagrammatic: (f then g) sends i to g[f[i]]
    comp = {(names[f], names[g]): names[tuple(g[i] for i in f)]
            for f in elems for g in elems}
    return FiniteCategory(Fin([o]), ms,
                          src={m: o for m in ms}, tgt={m: o for m in ms},
                          comp=comp, ident={o: names[idfn]})


def random_category(rng: random.Random, max_obj: int = 4, max_mor: int = 10):
    """A random finite category, alternating presentation styles."""
    style = rng.randrange(3)
    if style == 0:
        return random_preorder_category(rng, max_obj)
    if style == 1:
        return random_transformation_monoid(rng, points=rng.randint(2, 3),
                                            max_mor=max_mor)
    return zmod_category(rng.randint(1, 4))


def discrete_group_smc(n: int):
    """The discrete strict monoidal category on the cyclic group of order n."""
    from .algebras import StrictMonCat
    from .monoids import FiniteCategory
    obs = [atom(f"g{k}") for k in range(n)]
    idx = {o: k for k, o in enumerate(obs)}
    ids = {o: atom(f"i{k}") for k, o in enumerate(obs)}
    objects = Fin(obs)
    morphisms = Fin(ids.values())
    cat = FiniteCategory(objects, morphisms,
                         src={ids[o]: o for o in obs},
                         tgt={ids[o]: o for o in obs},
                         comp={(ids[o], ids[o]): ids[o] for o in obs},
                         ident=dict(ids))
    obj_tensor = {(p, q): obs[(idx[p] + idx[q]) % n] for p in obs for q in obs}
    mor_tensor = {(ids[p], ids[q]): ids[obj_tensor[(p, q)]]
                  for p in obs for q in obs}
    return StrictMonCat(cat, obs[0], obj_tensor, mor_tensor)
