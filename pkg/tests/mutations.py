"""Single-element witness mutations with independent neutrality analysis.

Each mutation kind comes with a neutrality predicate derived from the
validator definitions but computed locally (transition existence, action
expression evaluation, literal side conditions), never by re-running the
validator on the mutant.  For drop mutations exact neutrality is not locally
decidable; there the classifier enumerates the only two legitimate survival
reasons: a duplicate sibling branch, or disjunctive slack in the witnessed
formula (an Or row is the single explains rule that permits a smaller
annotation frame).
"""

from dataclasses import dataclass, replace

from tlace.formula import And, Exists, ForAll, Or
from tlace.tlace import Branch, TlaceNode


def node_addresses(root):
    """All node positions as tuples of (branch index, node index) hops."""
    out = [()]

    def walk(n, prefix):
        for bi, branch in enumerate(n.branches):
            if branch.path is None:
                continue
            for ni, child in enumerate(branch.path.nodes):
                address = prefix + ((bi, ni),)
                out.append(address)
                walk(child, address)

    walk(root, ())
    return out


def get_node(root, address):
    n = root
    for bi, ni in address:
        n = n.branches[bi].path.nodes[ni]
    return n


def replace_node(root, address, new_node):
    if not address:
        return new_node
    (bi, ni), rest = address[0], address[1:]
    branch = root.branches[bi]
    child = replace_node(branch.path.nodes[ni], rest, new_node)
    nodes = branch.path.nodes[:ni] + (child,) + branch.path.nodes[ni + 1:]
    new_branch = Branch(branch.formula, replace(branch.path, nodes=nodes))
    branches = root.branches[:bi] + (new_branch,) + root.branches[bi + 1:]
    return replace(root, branches=branches)


def _with_branch(owner, bi, new_branch):
    return replace(owner,
                   branches=owner.branches[:bi] + (new_branch,)
                   + owner.branches[bi + 1:])


@dataclass(frozen=True)
class Mutant:
    kind: str
    description: str
    tree: TlaceNode
    neutral: str | None  # survival reason, or None = must be killed


def _path_hop_target(path, position):
    """State entered by the action at this position (loop closing included)."""
    if position + 1 < len(path.nodes):
        return path.nodes[position + 1].state
    return path.nodes[path.loop_index].state


def _formula_contains_or(f):
    if isinstance(f, Or):
        return True
    if isinstance(f, And):
        return _formula_contains_or(f.left) or _formula_contains_or(f.right)
    if isinstance(f, (Exists, ForAll)):
        pi = f.path
        parts = (pi.operand,) if hasattr(pi, "operand") else (pi.left, pi.right)
        return any(_formula_contains_or(g) for g in parts)
    return False


def mutate_actions(root, mts, rng, per_site=2):
    for address in node_addresses(root):
        owner = get_node(root, address)
        for bi, branch in enumerate(owner.branches):
            if branch.path is None:
                continue
            path = branch.path
            for k, action in enumerate(path.actions):
                others = [a for a in mts.actions if a != action]
                for other in rng.sample(others, min(per_site, len(others))):
                    actions = path.actions[:k] + (other,) + path.actions[k + 1:]
                    mutated = _with_branch(owner, bi,
                                           Branch(branch.formula,
                                                  replace(path, actions=actions)))
                    target = _path_hop_target(path, k)
                    source = path.nodes[k].state
                    neutral = (mts.has_transition(source, other, target)
                               and mts.eval_action(other, branch.formula.alpha))
                    yield Mutant(
                        "alter-action",
                        f"{address}/branch[{bi}] action {k}: {action} -> {other}",
                        replace_node(root, address, mutated),
                        "parallel transition satisfying the action expression"
                        if neutral else None)


def mutate_states(root, mts, rng, per_site=2):
    for address in node_addresses(root):
        node = get_node(root, address)
        others = [s for s in mts.states if s != node.state]
        for other in rng.sample(others, min(per_site, len(others))):
            mutated = replace(node, state=other)
            neutral = None
            if address and _state_alter_is_neutral(root, address, node, other, mts):
                neutral = "relabeled state carries the same obligations"
            yield Mutant("alter-state",
                         f"{address}: state {node.state} -> {other}",
                         replace_node(root, address, mutated), neutral)


def _state_alter_is_neutral(root, address, node, new_state, mts):
    # Expanded branches pin their first path state to the owner; unexpanded
    # annotations are state-independent.
    if any(b.path is not None for b in node.branches):
        return False
    if not all(mts.eval_atom(new_state, lit) for lit in node.atomics):
        return False
    owner = get_node(root, address[:-1])
    bi, ni = address[-1]
    path = owner.branches[bi].path
    if ni == 0:
        return False  # consistency pins the first node to the owner's state
    hops = []
    hops.append((path.nodes[ni - 1].state, path.actions[ni - 1], new_state))
    if ni + 1 < len(path.nodes):
        hops.append((new_state, path.actions[ni], path.nodes[ni + 1].state))
    elif path.loop_index is not None:
        target = path.nodes[path.loop_index].state if path.loop_index != ni \
            else new_state
        hops.append((new_state, path.actions[-1], target))
    if path.loop_index == ni and ni + 1 < len(path.nodes):
        hops.append((path.nodes[-1].state, path.actions[-1], new_state))
    return all(mts.has_transition(s, a, t) for s, a, t in hops)


def mutate_drop_branches(root, target_formula):
    for address in node_addresses(root):
        node = get_node(root, address)
        for bi, branch in enumerate(node.branches):
            mutated = replace(node,
                              branches=node.branches[:bi] + node.branches[bi + 1:])
            if node.branches.count(branch) > 1:
                neutral = "duplicate sibling branch remains"
            elif _formula_contains_or(target_formula):
                neutral = "disjunctive slack in the witnessed formula"
            else:
                neutral = None
            yield Mutant("drop-branch", f"{address}: drop branch {bi}",
                         replace_node(root, address, mutated), neutral)


def mutate_drop_atomics(root, target_formula):
    for address in node_addresses(root):
        node = get_node(root, address)
        for lit in sorted(node.atomics, key=repr):
            mutated = replace(node, atomics=node.atomics - {lit})
            neutral = "disjunctive slack in the witnessed formula" \
                if _formula_contains_or(target_formula) else None
            yield Mutant("drop-atomic", f"{address}: drop {lit}",
                         replace_node(root, address, mutated), neutral)


def mutate_loop_targets(root, mts):
    for address in node_addresses(root):
        node = get_node(root, address)
        for bi, branch in enumerate(node.branches):
            if branch.path is None or branch.path.loop_index is None:
                continue
            path = branch.path
            for j in range(len(path.nodes)):
                if j == path.loop_index:
                    continue
                mutated = _with_branch(node, bi,
                                       Branch(branch.formula,
                                              replace(path, loop_index=j)))
                neutral = ("model also closes the loop at the new target"
                           if mts.has_transition(path.nodes[-1].state,
                                                 path.actions[-1],
                                                 path.nodes[j].state)
                           else None)
                yield Mutant("retarget-loop",
                             f"{address}/branch[{bi}]: loop -> {j}",
                             replace_node(root, address, mutated), neutral)


def all_mutants(root, mts, target_formula, rng):
    """Every single mutation of the witness, with neutrality analysis.

    Drop-mutation neutrality is a one-way gate (classifies survivors);
    action/state/loop neutrality predicates are exact.
    """
    yield from mutate_actions(root, mts, rng)
    yield from mutate_states(root, mts, rng)
    yield from mutate_drop_branches(root, target_formula)
    yield from mutate_drop_atomics(root, target_formula)
    yield from mutate_loop_targets(root, mts)

EXACT_KINDS = frozenset({"alter-action", "alter-state", "retarget-loop"})
