"""Context-manipulation lemmas as total derivation transformations.

Each operation rebuilds the derivation tree by the same induction the
corresponding proof uses, without re-running the checker; tests
cross-validate every output with the independent derivation validator.
Terms and types are preserved exactly, except that a bound variable is
renamed (deterministically) when it would collide with a name being
inserted into its context.
"""

from __future__ import annotations

from ..syntax import (
    Box, Ctx, CtxEntry, Dia, Lock, Mode, Term, Ty, Var, VarBind, free_vars,
    fresh_name, subst,
)
from ..typecheck import Derivation, TypecheckError, infer
from ..surface import print_term


class NameClash(Exception):
    pass


class ContextMismatch(Exception):
    pass


class ModeUnsupported(Exception):
    pass


class NotALock(Exception):
    pass


class VariableIsFree(Exception):
    pass


def _insert(ctx: Ctx, at: int, entries: tuple[CtxEntry, ...]) -> Ctx:
    return Ctx(ctx.entries[:at] + entries + ctx.entries[at:])


def _bound_names(d: Derivation) -> frozenset[str]:
    names = frozenset()
    for c in d.children:
        names |= _bound_names(c)
    extra = frozenset(e.name for e in d.ctx.entries if isinstance(e, VarBind))
    return names | extra


def _shift(i: int, at: int, by: int) -> int:
    return i + by if i >= at else i


def _rename_ctx_var(d: Derivation, old: str, new: str) -> Derivation:
    """Rename a context variable throughout a (valid) derivation. Inside a
    valid derivation no binder shadows a context name, so the renaming is
    uniform."""
    entries = tuple(VarBind(new, e.ty) if isinstance(e, VarBind) and e.name == old
                    else e for e in d.ctx.entries)
    term = subst(d.term, old, Var(new))
    kids = tuple(_rename_ctx_var(c, old, new) for c in d.children)
    return Derivation(d.rule, d.mode, Ctx(entries), term, d.ty, d.split, kids)


def _freshen_binders(d: Derivation, avoid: frozenset[str]) -> Derivation:
    """Rename binders that collide with `avoid`, so their names can be
    inserted into ambient contexts without duplication."""
    if not avoid & (_bound_names(d) - frozenset(d.ctx.names())):
        return d
    kids = list(d.children)
    term = d.term
    if d.rule == "Lam" and d.term.name in avoid:
        new = fresh_name(d.term.name, avoid | _bound_names(d) | free_vars(d.term))
        kids[0] = _rename_ctx_var(kids[0], d.term.name, new)
        term = type(d.term)(new, d.term.ty, kids[0].term)
    elif d.rule == "Case" and (d.term.left_name in avoid or d.term.right_name in avoid):
        lx, rx = d.term.left_name, d.term.right_name
        if lx in avoid:
            lx = fresh_name(lx, avoid | _bound_names(d) | free_vars(d.term))
            kids[1] = _rename_ctx_var(kids[1], d.term.left_name, lx)
        if rx in avoid:
            rx = fresh_name(rx, avoid | _bound_names(d) | free_vars(d.term) | {lx})
            kids[2] = _rename_ctx_var(kids[2], d.term.right_name, rx)
        term = type(d.term)(d.term.scrut, lx, kids[1].term, rx, kids[2].term)
    elif d.rule == "LetDia" and d.term.name in avoid:
        new = fresh_name(d.term.name, avoid | _bound_names(d) | free_vars(d.term))
        kids[1] = _rename_ctx_var(kids[1], d.term.name, new)
        term = type(d.term)(new, d.term.ty, d.term.scrut, kids[1].term)
    kids = [_freshen_binders(c, avoid) for c in kids]
    term = _rebuild_term(d.rule, term, kids)
    return Derivation(d.rule, d.mode, d.ctx, term, d.ty, d.split, tuple(kids))


def _rebuild_term(rule: str, term: Term, kids: list[Derivation]) -> Term:
    """Resync a node's term with its (possibly renamed) children."""
    from ..rewrite import with_children
    if rule in ("Var", "Unit"):
        return term
    return with_children(term, tuple(c.term for c in kids))


# ---------------------------------------------------------------------------
# Variable weakening

def weaken_var(d: Derivation, at: int, x: str, ty: Ty) -> Derivation:
    """Insert a fresh binding x:ty at position `at` of the root context.
    Inner binders that happen to collide are renamed."""
    if not 0 <= at <= len(d.ctx):
        raise ContextMismatch(f"position {at} outside the context")
    if x in d.ctx.names() or x in free_vars(d.term):
        raise NameClash(f"{x} is not fresh for the context")
    return _weaken(d, at, (VarBind(x, ty),))


def lock_weaken(d: Derivation, at: int) -> Derivation:
    """Insert a lock at position `at` (IR only: Lock Weakening)."""
    if d.mode.calculus != "IR":
        raise ModeUnsupported("lock weakening is an IR lemma")
    if not 0 <= at <= len(d.ctx):
        raise ContextMismatch(f"position {at} outside the context")
    return _weaken(d, at, (Lock(),))


def _weaken(d: Derivation, at: int, entries: tuple[CtxEntry, ...]) -> Derivation:
    """Shared induction for inserting entries at a root-context position."""
    names = frozenset(e.name for e in entries if isinstance(e, VarBind))
    if names:
        d = _freshen_binders(d, names)
    n = len(entries)
    new_ctx = _insert(d.ctx, at, entries)

    def node(split, children):
        return Derivation(d.rule, d.mode, new_ctx, d.term, d.ty, split, children)

    match d.rule:
        case "Var":
            return node(_shift(d.split, at, n), ())
        case "Lam" | "Shut" | "App" | "Pair" | "Proj1" | "Proj2" | "Inl" \
                | "Inr" | "Unit":
            return node(None, tuple(_weaken(c, at, entries) for c in d.children))
        case "Open" | "DiaIntro":
            if at <= d.split:
                return node(d.split + n, (_weaken(d.children[0], at, entries),))
            return node(d.split, d.children)
        case "Abort":
            if at <= d.split:
                return node(d.split + n, (_weaken(d.children[0], at, entries),))
            return node(d.split, d.children)
        case "Case":
            ds, dl, dr = d.children
            if at <= d.split:
                return node(d.split + n, (_weaken(ds, at, entries),
                                          _weaken(dl, at, entries),
                                          _weaken(dr, at, entries)))
            return node(d.split, (ds, _weaken(dl, at + 1, entries),
                                  _weaken(dr, at + 1, entries)))
        case "LetDia":
            ds, db = d.children
            return node(None, (_weaken(ds, at, entries), db))
    raise ValueError(f"unknown rule {d.rule}")


def left_weaken(d: Derivation, prefix: Ctx) -> Derivation:
    """Prepend a context: from G' |- t:A to G,G' |- t:A (any mode)."""
    clash = set(prefix.names()) & (set(d.ctx.names()) | free_vars(d.term))
    if clash:
        raise NameClash(f"prefix names {sorted(clash)} are not fresh")
    return _weaken(d, 0, prefix.entries)


def necessitate(d: Derivation) -> Derivation:
    """From a closed . |- t:A build . |- shut t : box A (necessitation)."""
    if len(d.ctx) != 0:
        raise ContextMismatch("necessitation needs a closed derivation")
    from ..syntax import Shut
    under = _weaken(d, 0, (Lock(),))
    return Derivation("Shut", d.mode, Ctx(), Shut(d.term), Box(d.ty), None, (under,))


# ---------------------------------------------------------------------------
# Substitution

def substitute_deriv(d: Derivation, u: Derivation) -> Derivation:
    """From G,x:A,G' |- t:B and G |- u:A build G,G' |- t[u/x]:B."""
    if d.mode != u.mode:
        raise ContextMismatch("modes differ")
    pos = len(u.ctx)
    if pos >= len(d.ctx) or d.ctx.entries[:pos] != u.ctx.entries:
        raise ContextMismatch("the substituend's context is not a prefix")
    entry = d.ctx[pos]
    if not isinstance(entry, VarBind):
        raise ContextMismatch("the entry after the shared prefix is a lock")
    if entry.ty != u.ty:
        raise ContextMismatch("substituend type differs from the binding")
    return _subst_deriv(d, pos, entry.name, u)


def _subst_deriv(d: Derivation, pos: int, x: str, u: Derivation) -> Derivation:
    new_ctx = Ctx(d.ctx.entries[:pos] + d.ctx.entries[pos + 1:])
    new_term = subst(d.term, x, u.term)

    def node(split, children):
        return Derivation(d.rule, d.mode, new_ctx, new_term, d.ty, split, children)

    match d.rule:
        case "Var":
            if d.split == pos:
                # Replace the leaf by u, weakened across the removed
                # binding's suffix (variable weakening; lock weakening in IR).
                out = u
                for entry in d.ctx.entries[pos + 1:]:
                    out = _weaken(out, len(out.ctx), (entry,))
                return out
            return node(_shift(d.split, pos, -1) if d.split > pos else d.split, ())
        case "Lam" | "Shut" | "App" | "Pair" | "Proj1" | "Proj2" | "Inl" \
                | "Inr" | "Unit":
            return node(None, tuple(_subst_deriv(c, pos, x, u) for c in d.children))
        case "Open" | "DiaIntro" | "Abort":
            if d.split <= pos:
                return node(d.split, d.children)
            return node(d.split - 1, (_subst_deriv(d.children[0], pos, x, u),))
        case "Case":
            ds, dl, dr = d.children
            if d.split <= pos:
                binder = dl.ctx[d.split]
                u_l = _weaken(u, d.split, (binder,))
                binder_r = dr.ctx[d.split]
                u_r = _weaken(u, d.split, (binder_r,))
                return node(d.split, (ds,
                                      _subst_deriv(dl, pos + 1, x, u_l),
                                      _subst_deriv(dr, pos + 1, x, u_r)))
            return node(d.split - 1, (_subst_deriv(ds, pos, x, u),
                                      _subst_deriv(dl, pos, x, u),
                                      _subst_deriv(dr, pos, x, u)))
        case "LetDia":
            ds, db = d.children
            return node(None, (_subst_deriv(ds, pos, x, u), db))
    raise ValueError(f"unknown rule {d.rule}")


# ---------------------------------------------------------------------------
# Lock replacement (IS4) and strengthening (IS4)

def lock_replace(d: Derivation, lock_at: int, new_suffix: Ctx) -> Derivation:
    """Replace the lock at `lock_at` by an arbitrary context (IS4)."""
    if d.mode.calculus != "IS4":
        raise ModeUnsupported("lock replacement is an IS4 lemma")
    if not (0 <= lock_at < len(d.ctx)) or not isinstance(d.ctx[lock_at], Lock):
        raise NotALock(f"no lock at position {lock_at}")
    clash = set(new_suffix.names()) & (set(d.ctx.names()) | free_vars(d.term))
    if clash:
        raise NameClash(f"suffix names {sorted(clash)} are not fresh")
    return _lock_replace(d, lock_at, new_suffix.entries)


def _lock_replace(d: Derivation, at: int, entries: tuple[CtxEntry, ...]) -> Derivation:
    names = frozenset(e.name for e in entries if isinstance(e, VarBind))
    if names:
        d = _freshen_binders(d, names)
    delta = len(entries) - 1
    new_ctx = Ctx(d.ctx.entries[:at] + entries + d.ctx.entries[at + 1:])

    def node(split, children):
        return Derivation(d.rule, d.mode, new_ctx, d.term, d.ty, split, children)

    match d.rule:
        case "Var":
            if d.split < at:
                # A lock sat to the right of the binding: impossible in a
                # valid IS4 Var node.
                raise ContextMismatch("variable bound left of the replaced lock")
            return node(d.split + delta, ())
        case "Lam" | "Shut" | "App" | "Pair" | "Proj1" | "Proj2" | "Inl" \
                | "Inr" | "Unit":
            return node(None, tuple(_lock_replace(c, at, entries) for c in d.children))
        case "Open" | "DiaIntro" | "Abort":
            if d.split <= at:
                return node(d.split, d.children)
            return node(d.split + delta, (_lock_replace(d.children[0], at, entries),))
        case "Case":
            ds, dl, dr = d.children
            if d.split <= at:
                return node(d.split, (ds, _lock_replace(dl, at + 1, entries),
                                      _lock_replace(dr, at + 1, entries)))
            return node(d.split + delta, (_lock_replace(ds, at, entries),
                                          _lock_replace(dl, at, entries),
                                          _lock_replace(dr, at, entries)))
        case "LetDia":
            ds, db = d.children
            return node(None, (_lock_replace(ds, at, entries), db))
    raise ValueError(f"unknown rule {d.rule}")


def strengthen(d: Derivation, start: int, end: int) -> Derivation:
    """Drop ctx[start:end] from G,G',G'' |- t:A when no variable of G' is
    free in t (IS4)."""
    if d.mode.calculus != "IS4":
        raise ModeUnsupported("strengthening is stated for IS4")
    if not (0 <= start <= end <= len(d.ctx)):
        raise ContextMismatch("bad strengthening range")
    dropped = {e.name for e in d.ctx.entries[start:end] if isinstance(e, VarBind)}
    if dropped & free_vars(d.term):
        offender = sorted(dropped & free_vars(d.term))[0]
        raise VariableIsFree(f"{offender} is free in `{print_term(d.term)}`")
    return _strengthen(d, start, end)


def _strengthen(d: Derivation, start: int, end: int) -> Derivation:
    if start == end:
        return d
    delta = end - start
    new_ctx = Ctx(d.ctx.entries[:start] + d.ctx.entries[end:])

    def node(split, children):
        return Derivation(d.rule, d.mode, new_ctx, d.term, d.ty, split, children)

    match d.rule:
        case "Var":
            if start <= d.split < end:
                raise VariableIsFree(f"{d.term.name} is bound in the dropped range")
            return node(d.split - delta if d.split >= end else d.split, ())
        case "Lam" | "Shut" | "App" | "Pair" | "Proj1" | "Proj2" | "Inl" \
                | "Inr" | "Unit":
            return node(None, tuple(_strengthen(c, start, end) for c in d.children))
        case "Open" | "DiaIntro" | "Abort":
            k = d.split
            if k <= start:
                return node(k, d.children)
            if k >= end:
                return node(k - delta, (_strengthen(d.children[0], start, end),))
            return node(start, (_strengthen(d.children[0], start, k),))
        case "Case":
            ds, dl, dr = d.children
            k = d.split
            if k <= start:
                return node(k, (ds, _strengthen(dl, start + 1, end + 1),
                                _strengthen(dr, start + 1, end + 1)))
            if k >= end:
                return node(k - delta, (_strengthen(ds, start, end),
                                        _strengthen(dl, start, end),
                                        _strengthen(dr, start, end)))
            return node(start, (_strengthen(ds, start, k),
                                _strengthen(_strengthen(dl, k + 1, end + 1), start, k),
                                _strengthen(_strengthen(dr, k + 1, end + 1), start, k)))
        case "LetDia":
            ds, db = d.children
            return node(None, (_strengthen(ds, start, end), db))
    raise ValueError(f"unknown rule {d.rule}")
