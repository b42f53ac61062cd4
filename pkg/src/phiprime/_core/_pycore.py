"""Pure-Python kernels. ``_ccore.pyx`` is a line-for-line typed twin of this file;
both must produce identical step counts, logs and outcomes."""

from ..vm import INVALID, RUNNING, Program, VMState, vm_step

# kernel status
ST_RUNNING, ST_DECIDED, ST_EXHAUSTED, ST_SATURATED = 0, 1, 2, 3
# loop phases
PH_QUERY, PH_POP, PH_ATTEMPT, PH_IDLE = 0, 1, 2, 3
# justification kinds
J_NONE, J_AXIOM, J_TOP, J_MP = 0, 1, 2, 3


class SatKernel:
    """Forward-chaining saturation over an interned statement universe.

    Statements are integer ids; ``is_impl/lhs/rhs/neg`` describe their shape.
    One step is one frontier pop, one rule application attempt or one bank
    query. ``target < 0`` with ``has_target`` means the target lies outside
    the universe (every query misses); ``has_target=False`` disables queries.
    """

    def __init__(self, is_impl, lhs, rhs, neg, axiom_ids, true_id, has_target, target, target_neg,
                 ts_first, fuel):
        n = len(is_impl)
        self.n = n
        self.is_impl = list(is_impl)
        self.lhs = list(lhs)
        self.rhs = list(rhs)
        self.neg = list(neg)
        self.fuel = fuel
        self.steps = 0
        self.status = ST_RUNNING
        self.phase = PH_QUERY if has_target else PH_POP
        self.has_target = has_target
        self.first_q = target if ts_first else target_neg
        self.second_q = target_neg if ts_first else target
        self.query_idx = 0
        self.decided = -1
        self.clash = -1
        self.ts_flags = bytearray(n)
        self.expanded = bytearray(n)
        self.covered = bytearray(n)
        self.just_kind = [J_NONE] * n
        self.just_a = [-1] * n
        self.just_b = [-1] * n
        self.first_rule = [-1] * n
        self.last_rule = [-1] * n
        self.next_rule = [-1] * n
        self.queue = []
        self.head = 0
        self.layer_end = 0
        self.edges = []
        self.attempts = 0
        self.cur_g = -1
        self.cur_r = -1
        self.stop_r = -1
        self.self_pending = False
        for k, a in enumerate(axiom_ids):
            if not self.ts_flags[a]:
                self._insert(a, J_AXIOM, k, -1)
        if not self.ts_flags[true_id]:
            self._insert(true_id, J_TOP, -1, -1)
        if self.fuel <= 0:
            self.status = ST_EXHAUSTED

    def _insert(self, q, kind, a, b):
        self.ts_flags[q] = 1
        self.just_kind[q] = kind
        self.just_a[q] = a
        self.just_b[q] = b
        self.queue.append(q)
        if self.is_impl[q]:
            x = self.lhs[q]
            if self.last_rule[x] < 0:
                self.first_rule[x] = q
            else:
                self.next_rule[self.last_rule[x]] = q
            self.last_rule[x] = q
        if self.clash < 0 and self.ts_flags[self.neg[q]]:
            self.clash = q

    def _derive(self, q, minor, major):
        self.attempts += 1
        self.edges.append((minor, q, major))
        if not self.ts_flags[q]:
            self._insert(q, J_MP, minor, major)

    def _pop(self):
        g = self.queue[self.head]
        self.head += 1
        self.expanded[g] = 1
        self.steps += 1
        self.cur_g = g
        self.cur_r = self.first_rule[g]
        self.stop_r = self.last_rule[g]
        self.self_pending = bool(self.is_impl[g] and self.expanded[self.lhs[g]] and not self.covered[g])
        self.phase = PH_ATTEMPT

    def _attempt(self):
        """Run one pending attempt; False when the current expansion is finished."""
        g = self.cur_g
        if self.cur_r >= 0:
            r = self.cur_r
            self.cur_r = -1 if r == self.stop_r else self.next_rule[r]
            self.covered[r] = 1
            self.steps += 1
            self._derive(self.rhs[r], g, r)
            return True
        if self.self_pending:
            self.self_pending = False
            self.steps += 1
            self._derive(self.rhs[g], self.lhs[g], g)
            return True
        self.phase = PH_POP
        return False

    def _step(self):
        """Consume exactly one step, or change status without consuming one."""
        while True:
            ph = self.phase
            if ph == PH_ATTEMPT:
                if self._attempt():
                    return
            elif ph == PH_POP:
                if self.head >= self.layer_end:
                    if self.has_target:
                        self.phase = PH_QUERY
                        continue
                    if self.head >= len(self.queue):
                        self.status = ST_SATURATED
                        return
                    self.layer_end = len(self.queue)
                self._pop()
                return
            elif ph == PH_QUERY:
                if self.query_idx < 2:
                    q = self.first_q if self.query_idx == 0 else self.second_q
                    self.query_idx += 1
                    self.steps += 1
                    if q >= 0 and self.ts_flags[q]:
                        self.decided = q
                        self.status = ST_DECIDED
                    return
                self.query_idx = 0
                if self.head >= len(self.queue):
                    self.phase = PH_IDLE
                else:
                    self.layer_end = len(self.queue)
                    self.phase = PH_POP
            else:
                self.steps += 1
                return

    def advance(self, k, stop_on_clash=False):
        """Run up to ``k`` steps; return the number actually consumed."""
        start = self.steps
        limit = start + k
        while self.status == ST_RUNNING and self.steps < limit:
            if stop_on_clash and self.clash >= 0:
                break
            if self.phase == PH_IDLE:
                self.steps = min(limit, self.fuel)
            else:
                self._step()
            if self.status == ST_RUNNING and self.steps >= self.fuel:
                self.status = ST_EXHAUSTED
        return self.steps - start

    def expand_next(self):
        """Pop one frontier statement and run all of its attempts, bypassing bank queries."""
        if self.head >= len(self.queue):
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

    # views -------------------------------------------------------------
    @property
    def n_ids(self):
        return self.n

    def in_ts(self, q):
        return bool(self.ts_flags[q])

    def ts_order(self):
        return list(self.queue)

    @property
    def pushes(self):
        """Frontier insertions so far (the queue is append-only)."""
        return len(self.queue)

    def frontier(self):
        return self.queue[self.head:]

    def justification(self, q):
        return self.just_kind[q], self.just_a[q], self.just_b[q]

    def edge_list(self):
        return list(self.edges)


class VMPool:
    """A set of VMs addressed by slot; ``step_many`` advances a batch one step each."""

    def __init__(self):
        self.vms = []

    def add(self, code) -> int:
        self.vms.append(VMState(Program(bytes(code))))
        return len(self.vms) - 1

    def step(self, slot) -> int:
        vm = self.vms[slot]
        vm_step(vm)
        return vm.status

    def step_many(self, slots):
        """Step each running slot once, in order; return ``[(position, status)]`` for those that halted."""
        halted = []
        vms = self.vms
        for pos, slot in enumerate(slots):
            vm = vms[slot]
            if vm.status == RUNNING:
                vm_step(vm)
                if vm.status != RUNNING:
                    halted.append((pos, vm.status))
        return halted

    def status(self, slot) -> int:
        return self.vms[slot].status

    def steps(self, slot) -> int:
        return self.vms[slot].steps

    def output(self, slot) -> bytes:
        return bytes(self.vms[slot].out)

    def counter(self, slot) -> int:
        return self.vms[slot].counter

    def stack(self, slot) -> list:
        return list(self.vms[slot].stack)


__all__ = ["SatKernel", "VMPool", "INVALID"]
