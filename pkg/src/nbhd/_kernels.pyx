# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels: the same four entry points and semantics as the
pure twin in _kernels_py, restricted to famasks that fit in 64 bits
(the backend routes wider carriers to the twin)."""

from cpython.mem cimport PyMem_Free, PyMem_Malloc
from libc.stdint cimport int64_t, uint64_t

COMPILED = True


cdef struct Prog:
    int n_ops
    int n_slots
    int n_rows
    int* opcodes
    int* opargs
    int* rows_flat
    uint64_t* stack


cdef int* _int_array(seq) except NULL:
    cdef Py_ssize_t k = len(seq)
    cdef Py_ssize_t i
    cdef int* arr = <int*> PyMem_Malloc((k if k > 0 else 1) * sizeof(int))
    if arr == NULL:
        raise MemoryError()
    for i in range(k):
        arr[i] = seq[i]
    return arr


cdef void _free_prog(Prog* p):
    PyMem_Free(p.opcodes)
    PyMem_Free(p.opargs)
    PyMem_Free(p.rows_flat)
    PyMem_Free(p.stack)


cdef int _init_prog(Prog* p, opcodes, opargs, n_slots, n_rows, rows_flat) except -1:
    p.n_ops = len(opcodes)
    p.n_slots = n_slots
    p.n_rows = n_rows
    p.opcodes = NULL
    p.opargs = NULL
    p.rows_flat = NULL
    p.stack = NULL
    p.opcodes = _int_array(opcodes)
    p.opargs = _int_array(opargs)
    p.rows_flat = _int_array(rows_flat)
    p.stack = <uint64_t*> PyMem_Malloc((p.n_ops if p.n_ops > 0 else 1) * sizeof(uint64_t))
    if p.stack == NULL:
        raise MemoryError()
    return 0


cdef bint _eval_membership_c(uint64_t famask, Prog* p) nogil:
    cdef int r, j, t, op, arg, base, sp
    cdef uint64_t acc
    for r in range(p.n_rows):
        base = r * p.n_slots
        sp = 0
        for j in range(p.n_ops):
            op = p.opcodes[j]
            arg = p.opargs[j]
            if op == 0:
                p.stack[sp] = famask >> p.rows_flat[base + arg] & 1
                sp += 1
            elif op == 1:
                p.stack[sp] = 1
                sp += 1
            elif op == 2:
                p.stack[sp - 1] ^= 1
            else:
                acc = 1
                for t in range(arg):
                    sp -= 1
                    acc &= p.stack[sp]
                p.stack[sp] = acc
                sp += 1
        if p.stack[sp - 1] == 0:
            return False
    return True


def eval_membership(famask, opcodes, opargs, n_slots, n_rows, rows_flat):
    """True when every row of the program accepts the family."""
    cdef Prog prog
    cdef uint64_t fm = famask
    cdef bint ok
    _init_prog(&prog, opcodes, opargs, n_slots, n_rows, rows_flat)
    try:
        ok = _eval_membership_c(fm, &prog)
    finally:
        _free_prog(&prog)
    return bool(ok)


cdef Prog* _init_progs(programs, int* count) except NULL:
    cdef int k = len(programs)
    cdef int i, done
    cdef Prog* progs = <Prog*> PyMem_Malloc((k if k > 0 else 1) * sizeof(Prog))
    if progs == NULL:
        raise MemoryError()
    done = 0
    try:
        for i in range(k):
            opcodes, opargs, n_slots, n_rows, rows_flat = programs[i]
            _init_prog(&progs[i], opcodes, opargs, n_slots, n_rows, rows_flat)
            done += 1
    except BaseException:
        for i in range(done):
            _free_prog(&progs[i])
        PyMem_Free(progs)
        raise
    count[0] = k
    return progs


cdef void _free_progs(Prog* progs, int count):
    cdef int i
    for i in range(count):
        _free_prog(&progs[i])
    PyMem_Free(progs)


def family_filter(start, stop, programs):
    """Ascending famasks in [start, stop) accepted by every program."""
    cdef int n_progs = 0
    cdef Prog* progs = _init_progs(programs, &n_progs)
    cdef uint64_t fm, lo = start, hi = stop
    cdef int i
    cdef bint ok
    out = []
    try:
        fm = lo
        while fm < hi:
            ok = True
            for i in range(n_progs):
                if not _eval_membership_c(fm, &progs[i]):
                    ok = False
                    break
            if ok:
                out.append(fm)
            fm += 1
    finally:
        _free_progs(progs, n_progs)
    return out


cdef void _upset_rec(int p, uint64_t fam, int m, int* order, uint64_t* succ,
                     uint64_t required, Prog* progs, int n_progs, list out):
    cdef int s, i
    if p == m:
        for i in range(n_progs):
            if not _eval_membership_c(fam, &progs[i]):
                return
        out.append(fam)
        return
    s = order[p]
    if not (required >> s & 1):
        _upset_rec(p + 1, fam, m, order, succ, required, progs, n_progs, out)
    if (succ[s] & fam) == succ[s]:
        _upset_rec(p + 1, fam | (<uint64_t> 1) << s, m, order, succ, required, progs, n_progs, out)


def upset_enumerate(m, succ, required, programs):
    """Ascending famasks of up-closed families over m subset-masks.

    succ[s] is the famask of the immediate supersets of s; membership of s
    is decided after all of them, so up-closure is a local test.  required
    is a famask of subsets that must be present; programs filter leaves.
    """
    cdef int n_progs = 0
    cdef int mm = m
    cdef int i
    cdef uint64_t req = required
    order_py = sorted(range(mm), key=lambda s: (-bin(s).count("1"), s))
    cdef int* order = _int_array(order_py)
    cdef uint64_t* succ_c = <uint64_t*> PyMem_Malloc((mm if mm > 0 else 1) * sizeof(uint64_t))
    cdef Prog* progs = NULL
    if succ_c == NULL:
        PyMem_Free(order)
        raise MemoryError()
    out = []
    try:
        for i in range(mm):
            succ_c[i] = succ[i]
        progs = _init_progs(programs, &n_progs)
        _upset_rec(0, 0, mm, order, succ_c, req, progs, n_progs, out)
    finally:
        if progs != NULL:
            _free_progs(progs, n_progs)
        PyMem_Free(succ_c)
        PyMem_Free(order)
    out.sort()
    return out


def algebra_refute(box, n, opcodes, opargs, n_vars, start=0, stop=None):
    """Index of the first assignment in [start, stop) where the program
    evaluates below the full set, or -1.  Assignment index idx encodes
    variable i (first-occurrence order) as digit i base 2^n, first
    variable most significant."""
    cdef int nn = n
    cdef int64_t m = <int64_t> 1 << nn
    cdef uint64_t full = <uint64_t> (m - 1)
    cdef int k_vars = n_vars
    total_py = int(m) ** int(k_vars)
    stop_py = total_py if stop is None else min(stop, total_py)
    if start >= stop_py:
        return -1
    cdef int64_t c_start = start
    cdef int64_t c_stop = stop_py
    cdef int n_ops = len(opcodes)
    cdef int* ops = _int_array(opcodes)
    cdef int* args = _int_array(opargs)
    cdef uint64_t* box_c = NULL
    cdef uint64_t* values = NULL
    cdef uint64_t* stack = NULL
    cdef int64_t idx, rest
    cdef int i, j, t, op, arg, sp
    cdef uint64_t acc
    cdef int64_t found = -1
    try:
        box_c = <uint64_t*> PyMem_Malloc((<size_t> m) * sizeof(uint64_t))
        values = <uint64_t*> PyMem_Malloc((k_vars if k_vars > 0 else 1) * sizeof(uint64_t))
        stack = <uint64_t*> PyMem_Malloc((n_ops if n_ops > 0 else 1) * sizeof(uint64_t))
        if box_c == NULL or values == NULL or stack == NULL:
            raise MemoryError()
        for i in range(m):
            box_c[i] = box[i]
        rest = c_start
        for i in range(k_vars - 1, -1, -1):
            values[i] = <uint64_t> (rest % m)
            rest //= m
        with nogil:
            for idx in range(c_start, c_stop):
                sp = 0
                for j in range(n_ops):
                    op = ops[j]
                    arg = args[j]
                    if op == 0:
                        stack[sp] = values[arg]
                        sp += 1
                    elif op == 1:
                        stack[sp] = full
                        sp += 1
                    elif op == 2:
                        stack[sp - 1] ^= full
                    elif op == 3:
                        acc = full
                        for t in range(arg):
                            sp -= 1
                            acc &= stack[sp]
                        stack[sp] = acc
                        sp += 1
                    else:
                        stack[sp - 1] = box_c[stack[sp - 1]]
                if stack[sp - 1] != full:
                    found = idx
                    break
                i = k_vars - 1
                while i >= 0:
                    values[i] += 1
                    if values[i] == <uint64_t> m:
                        values[i] = 0
                        i -= 1
                    else:
                        break
    finally:
        PyMem_Free(box_c)
        PyMem_Free(values)
        PyMem_Free(stack)
    return found
