"""Pure Python twin of the compiled kernels.

Same four entry points as nbhd._kernels, same semantics, arbitrary-width
Python ints.  Membership programs are postfix code over box-atom slots:
opcode 0 pushes the famask bit for the slot's mask in the current row,
1 pushes true, 2 negates the top, 3 folds an and of `arg` operands.
Algebra programs add opcode 4 (box table lookup) and use opcode 0 for
variable values, 1 for the full set, with masks instead of bits.
"""

from __future__ import annotations

COMPILED = False


def eval_membership(famask, opcodes, opargs, n_slots, n_rows, rows_flat):
    """True when every row of the program accepts the family."""
    n_ops = len(opcodes)
    for r in range(n_rows):
        base = r * n_slots
        stack = []
        for j in range(n_ops):
            op = opcodes[j]
            arg = opargs[j]
            if op == 0:
                stack.append(famask >> rows_flat[base + arg] & 1)
            elif op == 1:
                stack.append(1)
            elif op == 2:
                stack[-1] ^= 1
            else:
                acc = 1
                for _ in range(arg):
                    acc &= stack.pop()
                stack.append(acc)
        if not stack[-1]:
            return False
    return True


def family_filter(start, stop, programs):
    """Ascending famasks in [start, stop) accepted by every program."""
    out = []
    for famask in range(start, stop):
        for prog in programs:
            if not eval_membership(famask, *prog):
                break
        else:
            out.append(famask)
    return out


def upset_enumerate(m, succ, required, programs):
    """Ascending famasks of up-closed families over m subset-masks.

    succ[s] is the famask of the immediate supersets of s; membership of s
    is decided after all of them, so up-closure is a local test.  required
    is a famask of subsets that must be present; programs filter leaves.
    """
    order = sorted(range(m), key=lambda s: (-(s.bit_count()), s))
    out = []

    def rec(p, fam):
        if p == len(order):
            for prog in programs:
                if not eval_membership(fam, *prog):
                    return
            out.append(fam)
            return
        s = order[p]
        if not required >> s & 1:
            rec(p + 1, fam)
        if succ[s] & fam == succ[s]:
            rec(p + 1, fam | 1 << s)

    rec(0, 0)
    out.sort()
    return out


def algebra_refute(box, n, opcodes, opargs, n_vars, start=0, stop=None):
    """Index of the first assignment in [start, stop) where the program
    evaluates below the full set, or -1.  Assignment index idx encodes
    variable i (first-occurrence order) as digit i base 2^n, first
    variable most significant."""
    m = 1 << n
    full = m - 1
    total = m**n_vars
    if stop is None or stop > total:
        stop = total
    if start >= stop:
        return -1
    values = [0] * n_vars
    rest = start
    for i in range(n_vars - 1, -1, -1):
        values[i] = rest % m
        rest //= m
    n_ops = len(opcodes)
    for idx in range(start, stop):
        stack = []
        for j in range(n_ops):
            op = opcodes[j]
            arg = opargs[j]
            if op == 0:
                stack.append(values[arg])
            elif op == 1:
                stack.append(full)
            elif op == 2:
                stack[-1] ^= full
            elif op == 3:
                acc = full
                for _ in range(arg):
                    acc &= stack.pop()
                stack.append(acc)
            else:
                stack[-1] = box[stack[-1]]
        if stack[-1] != full:
            return idx
        i = n_vars - 1
        while i >= 0:
            values[i] += 1
            if values[i] == m:
                values[i] = 0
                i -= 1
            else:
                break
    return -1
