# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels; typed twin of ``_pycore.py`` (same steps, logs and outcomes)."""

from libc.stdlib cimport malloc, realloc, free
from libc.string cimport memset
from cpython.bytes cimport PyBytes_FromStringAndSize

cdef enum:
    STACK_LIMIT = 256
    OUTPUT_LIMIT = 65536

cdef enum:
    ST_RUNNING = 0
    ST_DECIDED = 1
    ST_EXHAUSTED = 2
    ST_SATURATED = 3
    PH_QUERY = 0
    PH_POP = 1
    PH_ATTEMPT = 2
    PH_IDLE = 3
    J_NONE = 0
    J_AXIOM = 1
    J_TOP = 2
    J_MP = 3


cdef int* _ints(Py_ssize_t n, int fill) except NULL:
    cdef int* p = <int*> malloc((n if n > 0 else 1) * sizeof(int))
    if p == NULL:
        raise MemoryError()
    cdef Py_ssize_t i
    for i in range(n):
        p[i] = fill
    return p


cdef class SatKernel:
    cdef int n
    cdef int* is_impl
    cdef int* lhs_
    cdef int* rhs_
    cdef int* neg_
    cdef unsigned char* in_ts_
    cdef unsigned char* expanded_
    cdef unsigned char* covered_
    cdef int* jkind
    cdef int* ja
    cdef int* jb
    cdef int* first_rule
    cdef int* last_rule
    cdef int* next_rule
    cdef int* queue_
    cdef int qlen
    cdef int* edges_
    cdef Py_ssize_t n_edges
    cdef Py_ssize_t cap_edges
    cdef public long long fuel
    cdef public long long steps
    cdef public int status
    cdef public int phase
    cdef public bint has_target
    cdef int first_q
    cdef int second_q
    cdef int query_idx
    cdef public int decided
    cdef public int clash
    cdef public int head
    cdef public int layer_end
    cdef public long long attempts
    cdef public int cur_g
    cdef int cur_r
    cdef int stop_r
    cdef bint self_pending

    def __cinit__(self):
        self.is_impl = NULL
        self.lhs_ = NULL
        self.rhs_ = NULL
        self.neg_ = NULL
        self.in_ts_ = NULL
        self.expanded_ = NULL
        self.covered_ = NULL
        self.jkind = NULL
        self.ja = NULL
        self.jb = NULL
        self.first_rule = NULL
        self.last_rule = NULL
        self.next_rule = NULL
        self.queue_ = NULL
        self.edges_ = NULL

    def __init__(self, is_impl, lhs, rhs, neg, axiom_ids, int true_id, bint has_target, int target,
                 int target_neg, bint ts_first, long long fuel):
        cdef int n = len(is_impl)
        cdef int i
        self.n = n
        self.is_impl = _ints(n, 0)
        self.lhs_ = _ints(n, -1)
        self.rhs_ = _ints(n, -1)
        self.neg_ = _ints(n, -1)
        for i in range(n):
            self.is_impl[i] = is_impl[i]
            self.lhs_[i] = lhs[i]
            self.rhs_[i] = rhs[i]
            self.neg_[i] = neg[i]
        self.in_ts_ = <unsigned char*> malloc(n + 1)
        self.expanded_ = <unsigned char*> malloc(n + 1)
        self.covered_ = <unsigned char*> malloc(n + 1)
        if self.in_ts_ == NULL or self.expanded_ == NULL or self.covered_ == NULL:
            raise MemoryError()
        memset(self.in_ts_, 0, n + 1)
        memset(self.expanded_, 0, n + 1)
        memset(self.covered_, 0, n + 1)
        self.jkind = _ints(n, J_NONE)
        self.ja = _ints(n, -1)
        self.jb = _ints(n, -1)
        self.first_rule = _ints(n, -1)
        self.last_rule = _ints(n, -1)
        self.next_rule = _ints(n, -1)
        self.queue_ = _ints(n, -1)
        self.qlen = 0
        self.cap_edges = 64
        self.n_edges = 0
        self.edges_ = <int*> malloc(3 * self.cap_edges * sizeof(int))
        if self.edges_ == NULL:
            raise MemoryError()
        self.fuel = fuel
        self.steps = 0
        self.status = ST_RUNNING
        self.has_target = has_target
        self.phase = PH_QUERY if has_target else PH_POP
        self.first_q = target if ts_first else target_neg
        self.second_q = target_neg if ts_first else target
        self.query_idx = 0
        self.decided = -1
        self.clash = -1
        self.head = 0
        self.layer_end = 0
        self.attempts = 0
        self.cur_g = -1
        self.cur_r = -1
        self.stop_r = -1
        self.self_pending = False
        cdef int k = 0
        for a in axiom_ids:
            if not self.in_ts_[<int> a]:
                self._insert(a, J_AXIOM, k, -1)
            k += 1
        if not self.in_ts_[true_id]:
            self._insert(true_id, J_TOP, -1, -1)
        if self.fuel <= 0:
            self.status = ST_EXHAUSTED

    def __dealloc__(self):
        free(self.is_impl)
        free(self.lhs_)
        free(self.rhs_)
        free(self.neg_)
        free(self.in_ts_)
        free(self.expanded_)
        free(self.covered_)
        free(self.jkind)
        free(self.ja)
        free(self.jb)
        free(self.first_rule)
        free(self.last_rule)
        free(self.next_rule)
        free(self.queue_)
        free(self.edges_)

    cdef inline void _insert(self, int q, int kind, int a, int b) noexcept:
        cdef int x
        self.in_ts_[q] = 1
        self.jkind[q] = kind
        self.ja[q] = a
        self.jb[q] = b
        self.queue_[self.qlen] = q
        self.qlen += 1
        if self.is_impl[q]:
            x = self.lhs_[q]
            if self.last_rule[x] < 0:
                self.first_rule[x] = q
            else:
                self.next_rule[self.last_rule[x]] = q
            self.last_rule[x] = q
        if self.clash < 0 and self.in_ts_[self.neg_[q]]:
            self.clash = q

    cdef int _derive(self, int q, int minor, int major) except -1:
        cdef int* grown
        self.attempts += 1
        if self.n_edges == self.cap_edges:
            grown = <int*> realloc(self.edges_, 6 * self.cap_edges * sizeof(int))
            if grown == NULL:
                raise MemoryError()
            self.edges_ = grown
            self.cap_edges *= 2
        self.edges_[3 * self.n_edges] = minor
        self.edges_[3 * self.n_edges + 1] = q
        self.edges_[3 * self.n_edges + 2] = major
        self.n_edges += 1
        if not self.in_ts_[q]:
            self._insert(q, J_MP, minor, major)
        return 0

    cdef inline void _pop(self) noexcept:
        cdef int g = self.queue_[self.head]
        self.head += 1
        self.expanded_[g] = 1
        self.steps += 1
        self.cur_g = g
        self.cur_r = self.first_rule[g]
        self.stop_r = self.last_rule[g]
        self.self_pending = self.is_impl[g] and self.expanded_[self.lhs_[g]] and not self.covered_[g]
        self.phase = PH_ATTEMPT

    cdef int _attempt(self) except -1:
        cdef int g = self.cur_g
        cdef int r
        if self.cur_r >= 0:
            r = self.cur_r
            self.cur_r = -1 if r == self.stop_r else self.next_rule[r]
            self.covered_[r] = 1
            self.steps += 1
            self._derive(self.rhs_[r], g, r)
            return 1
        if self.self_pending:
            self.self_pending = False
            self.steps += 1
            self._derive(self.rhs_[g], self.lhs_[g], g)
            return 1
        self.phase = PH_POP
        return 0

    cdef int _step(self) except -1:
        cdef int q
        while True:
            if self.phase == PH_ATTEMPT:
                if self._attempt():
                    return 0
            elif self.phase == PH_POP:
                if self.head >= self.layer_end:
                    if self.has_target:
                        self.phase = PH_QUERY
                        continue
                    if self.head >= self.qlen:
                        self.status = ST_SATURATED
                        return 0
                    self.layer_end = self.qlen
                self._pop()
                return 0
            elif self.phase == PH_QUERY:
                if self.query_idx < 2:
                    q = self.first_q if self.query_idx == 0 else self.second_q
                    self.query_idx += 1
                    self.steps += 1
                    if q >= 0 and self.in_ts_[q]:
                        self.decided = q
                        self.status = ST_DECIDED
                    return 0
                self.query_idx = 0
                if self.head >= self.qlen:
                    self.phase = PH_IDLE
                else:
                    self.layer_end = self.qlen
                    self.phase = PH_POP
            else:
                self.steps += 1
                return 0

    def advance(self, long long k, bint stop_on_clash=False):
        cdef long long start = self.steps
        cdef long long limit = start + k
        while self.status == ST_RUNNING and self.steps < limit:
            if stop_on_clash and self.clash >= 0:
                break
            if self.phase == PH_IDLE:
                self.steps = limit if limit < self.fuel else self.fuel
            else:
                self._step()
            if self.status == ST_RUNNING and self.steps >= self.fuel:
                self.status = ST_EXHAUSTED
        return self.steps - start

    def expand_next(self):
        if self.head >= self.qlen:
            raise IndexError("frontier is empty")
        if self.phase == PH_ATTEMPT:
            while self._attempt():
                pass
        self._pop()
        while self._attempt():
            pass
        if self.head > self.layer_end:
            self.layer_end = self.head
        return self.cur_g

    @property
    def n_ids(self):
        return self.n

    def in_ts(self, int q):
        return bool(self.in_ts_[q])

    def ts_order(self):
        return [self.queue_[i] for i in range(self.qlen)]

    @property
    def pushes(self):
        return self.qlen

    def frontier(self):
        return [self.queue_[i] for i in range(self.head, self.qlen)]

    def justification(self, int q):
        return self.jkind[q], self.ja[q], self.jb[q]

    def edge_list(self):
        return [(self.edges_[3 * i], self.edges_[3 * i + 1], self.edges_[3 * i + 2]) for i in range(self.n_edges)]


cdef class _VM:
    cdef bytes code
    cdef const unsigned char* c
    cdef Py_ssize_t size
    cdef int pc
    cdef unsigned int stack[STACK_LIMIT]
    cdef int sp
    cdef unsigned char* out
    cdef Py_ssize_t out_len
    cdef Py_ssize_t out_cap
    cdef int status
    cdef long long steps

    def __cinit__(self, bytes code):
        self.code = code
        self.c = code
        self.size = len(code)
        self.pc = 0
        self.sp = 0
        self.out = NULL
        self.out_len = 0
        self.out_cap = 0
        self.status = 0
        self.steps = 0

    def __dealloc__(self):
        free(self.out)

    cdef int step(self) except -1:
        cdef int pc = self.pc
        cdef unsigned char op
        cdef unsigned int v
        cdef unsigned char* grown
        self.steps += 1
        if pc >= self.size:
            self.status = 2
            return 0
        op = self.c[pc]
        if op == 0:
            self.pc = pc + 1
        elif op == 1 or op == 5:
            if pc + 1 >= self.size:
                self.status = 2
                return 0
            if op == 1:
                if self.sp >= STACK_LIMIT:
                    self.status = 2
                    return 0
                self.stack[self.sp] = self.c[pc + 1]
                self.sp += 1
                self.pc = pc + 2
            else:
                if self.sp == 0:
                    self.status = 2
                    return 0
                self.sp -= 1
                self.pc = self.c[pc + 1] if self.stack[self.sp] == 0 else pc + 2
        elif op == 2:
            if self.sp == 0 or self.sp >= STACK_LIMIT:
                self.status = 2
                return 0
            self.stack[self.sp] = self.stack[self.sp - 1]
            self.sp += 1
            self.pc = pc + 1
        elif op == 3:
            if self.sp == 0:
                self.status = 2
                return 0
            self.sp -= 1
            self.pc = pc + 1
        elif op == 4:
            if self.sp < 2:
                self.status = 2
                return 0
            self.sp -= 1
            self.stack[self.sp - 1] = self.stack[self.sp - 1] + self.stack[self.sp]
            self.pc = pc + 1
        elif op == 6:
            if self.sp == 0 or self.out_len >= OUTPUT_LIMIT:
                self.status = 2
                return 0
            if self.out_len == self.out_cap:
                self.out_cap = 64 if self.out_cap == 0 else 2 * self.out_cap
                grown = <unsigned char*> realloc(self.out, self.out_cap)
                if grown == NULL:
                    raise MemoryError()
                self.out = grown
            self.sp -= 1
            self.out[self.out_len] = self.stack[self.sp] & 0xFF
            self.out_len += 1
            self.pc = pc + 1
        elif op == 7:
            self.status = 1
        else:
            self.status = 2
        return 0


cdef class VMPool:
    cdef list vms

    def __init__(self):
        self.vms = []

    def add(self, code):
        self.vms.append(_VM(bytes(code)))
        return len(self.vms) - 1

    def step(self, Py_ssize_t slot):
        cdef _VM vm = self.vms[slot]
        if vm.status != 0:
            raise ValueError("vm_step on a halted machine")
        vm.step()
        return vm.status

    def step_many(self, slots):
        cdef list halted = []
        cdef list vms = self.vms
        cdef Py_ssize_t pos = 0
        cdef _VM vm
        for slot in slots:
            vm = <_VM> vms[slot]
            if vm.status == 0:
                vm.step()
                if vm.status != 0:
                    halted.append((pos, vm.status))
            pos += 1
        return halted

    def status(self, Py_ssize_t slot):
        return (<_VM> self.vms[slot]).status

    def steps(self, Py_ssize_t slot):
        return (<_VM> self.vms[slot]).steps

    def output(self, Py_ssize_t slot):
        cdef _VM vm = self.vms[slot]
        if vm.out_len == 0:
            return b""
        return PyBytes_FromStringAndSize(<char*> vm.out, vm.out_len)

    def counter(self, Py_ssize_t slot):
        return (<_VM> self.vms[slot]).pc

    def stack(self, Py_ssize_t slot):
        cdef _VM vm = self.vms[slot]
        return [vm.stack[i] for i in range(vm.sp)]
