# cython: language_level=3
"""Simulation kernel: event engine, queue disciplines, and the TCP flow model.

This module is the hot path of the simulator. It is deliberately
self-contained (stdlib only) so the same source can be compiled to a C
extension (fqsim._kernel_c) or run interpreted; both must produce
bit-identical results for a given workload. Import it through fqsim.kernel,
which picks the fastest available backend.

Everything here is single-threaded and deterministic: the event loop breaks
ties by insertion order, and no code path consults wall-clock time or
unordered container iteration.
"""

import heapq
import random

INF = float("inf")

# Event kinds (heap payload tag).
K_FLOW_START = 0
K_ARRIVE_FWD = 1     # packet reaches the forward bottleneck queue
K_TXDONE_FWD = 2     # forward bottleneck finished serializing a packet
K_ARRIVE_REV = 3     # packet reaches the reverse bottleneck link
K_ACK_AT_SRC = 4     # cumulative ACK delivered to the sender
K_REV_DELIVER = 5    # reverse-direction data delivered; ACK returned inline
K_TIMER = 6          # retransmission timer check for a flow

# Sender states.
ST_SYN_SENT = 0
ST_SLOW_START = 1
ST_CONG_AVOID = 2
ST_FAST_REC = 3
ST_DONE = 4

DIR_FWD = 0
DIR_REV = 1


class RngStreams:
    """Independent pseudo-random streams derived from one master seed.

    Each stochastic source (arrivals, sizes, RTT assignment, reverse traffic)
    gets its own stream id, so changing one traffic knob never perturbs the
    draws of another. (seed, stream_id) -> identical sequence on every
    platform (Mersenne Twister seeded from a plain int).
    """

    __slots__ = ("seed",)

    def __init__(self, seed):
        self.seed = int(seed)

    def stream(self, stream_id):
        if stream_id < 0 or stream_id >= (1 << 16):
            raise ValueError("stream_id must be in [0, 65535]")
        return random.Random((self.seed << 16) + stream_id)


class EventLoop:
    """Time-ordered event queue with FIFO tie-breaking and cancellation.

    Simultaneous events fire in insertion order. Scheduling in the past is a
    programming error and raises immediately.
    """

    __slots__ = ("now", "processed", "_heap", "_next_handle", "_cancelled")

    def __init__(self):
        self.now = 0.0
        self.processed = 0
        self._heap = []
        self._next_handle = 0
        self._cancelled = set()

    def schedule(self, fire_at, kind, a, b):
        if fire_at < self.now:
            raise ValueError(
                "cannot schedule event at t=%r before current clock t=%r"
                % (fire_at, self.now)
            )
        handle = self._next_handle
        self._next_handle = handle + 1
        heapq.heappush(self._heap, (fire_at, handle, kind, a, b))
        return handle

    def cancel(self, handle):
        self._cancelled.add(handle)

    def __len__(self):
        return len(self._heap)

    def peek_time(self):
        return self._heap[0][0] if self._heap else None

    def run_until(self, horizon, handler):
        """Process every event with fire_at <= horizon, in order.

        handler is called as handler(t, kind, a, b). Returns the final clock,
        which is horizon when the heap drains early.
        """
        heap = self._heap
        cancelled = self._cancelled
        while heap:
            entry = heap[0]
            t = entry[0]
            if t > horizon:
                break
            heapq.heappop(heap)
            if cancelled and entry[1] in cancelled:
                cancelled.discard(entry[1])
                continue
            self.now = t
            self.processed += 1
            handler(t, entry[2], entry[3], entry[4])
        if self.now < horizon:
            self.now = horizon
        return self.now


class Packet:
    """One packet in flight. favoured is assigned once, at enqueue time."""

    __slots__ = ("flow", "seq", "size", "retx", "favoured", "born",
                 "enq_t", "is_ack")

    def __init__(self, flow, seq, size, retx, born):
        self.flow = flow
        self.seq = seq
        self.size = size
        self.retx = retx
        self.favoured = False
        self.born = born
        self.enq_t = 0.0
        self.is_ack = False


class DropTailQueue:
    """Plain FIFO with tail drop. The baseline discipline."""

    __slots__ = ("buffer", "capacity", "trace")

    def __init__(self, capacity, trace=None):
        self.buffer = []
        self.capacity = capacity
        self.trace = trace

    def __len__(self):
        return len(self.buffer)

    def enqueue(self, pkt, t):
        """Returns (enqueued, pushed_out_victim); the victim is always None."""
        buf = self.buffer
        if len(buf) < self.capacity:
            pkt.enq_t = t
            buf.append(pkt)
            if self.trace is not None:
                _trace_line(self.trace, t, "enq", pkt, len(buf))
            return True, None
        if self.trace is not None:
            _trace_line(self.trace, t, "drop", pkt, len(buf))
        return False, None

    def dequeue(self, t):
        buf = self.buffer
        if not buf:
            return None
        pkt = buf.pop(0)
        if self.trace is not None:
            _trace_line(self.trace, t, "deq", pkt, len(buf))
        return pkt


class FavourQueue:
    """Queue that favours packets whose flow is not currently in the buffer.

    The buffer is one list split at pos: favoured packets occupy [0, pos),
    standard packets [pos, len). A favoured arrival is inserted at pos (tail
    of the favoured region); a standard arrival is appended. When the queue
    is full and push_out is enabled, a favoured arrival evicts the standard
    packet closest to the tail; if every resident packet is favoured, the
    arrival is dropped instead. Within each region order is arrival order,
    so a flow's packets never get reordered (at most one of them can be
    favoured at a time).
    """

    __slots__ = ("buffer", "capacity", "pos", "push_out", "trace")

    def __init__(self, capacity, push_out, trace=None):
        self.buffer = []
        self.capacity = capacity
        self.pos = 0
        self.push_out = push_out
        self.trace = trace

    def __len__(self):
        return len(self.buffer)

    def contains_flow(self, flow):
        for p in self.buffer:
            if p.flow is flow:
                return True
        return False

    def enqueue(self, pkt, t):
        """Returns (enqueued, pushed_out_victim)."""
        buf = self.buffer
        n = len(buf)
        fresh = True
        flow = pkt.flow
        for i in range(n):
            if buf[i].flow is flow:
                fresh = False
                break
        trace = self.trace
        if fresh:
            pkt.favoured = True
            if n >= self.capacity:
                if self.pos >= n or not self.push_out:
                    # Nothing evictable (all favoured) or push-out disabled.
                    if trace is not None:
                        _trace_line(trace, t, "drop", pkt, n)
                    return False, None
                victim = buf.pop()
                if trace is not None:
                    _trace_line(trace, t, "push_out", victim, len(buf))
            else:
                victim = None
            pkt.enq_t = t
            buf.insert(self.pos, pkt)
            self.pos += 1
            if trace is not None:
                _trace_line(trace, t, "enq", pkt, len(buf))
            return True, victim
        pkt.favoured = False
        if n < self.capacity:
            pkt.enq_t = t
            buf.append(pkt)
            if trace is not None:
                _trace_line(trace, t, "enq", pkt, len(buf))
            return True, None
        if trace is not None:
            _trace_line(trace, t, "drop", pkt, n)
        return False, None

    def dequeue(self, t):
        buf = self.buffer
        if not buf:
            return None
        pkt = buf.pop(0)
        if pkt.favoured:
            self.pos -= 1
        if self.trace is not None:
            _trace_line(self.trace, t, "deq", pkt, len(buf))
        return pkt


def _trace_line(sink, t, op, pkt, qlen):
    sink.write("%.9f %s %d %d %d %d\n"
               % (t, op, pkt.flow.fid, pkt.seq, 1 if pkt.favoured else 0, qlen))


class FifoLink:
    """DropTail FIFO + transmitter, folded into a waiting-time recursion.

    Service order on a FIFO link is arrival order, so each packet's service
    start is max(arrival, previous service end) and the buffer occupancy
    seen by an arrival is the number of earlier packets whose service has
    not started yet. This computes, per arrival, the exact same admission
    decision and departure time as an event-driven DropTailQueue plus
    transmitter, with no transmission-complete events. Arrivals must be fed
    in (time, insertion)-order, which the event loop guarantees.

    A packet whose service starts exactly at an arrival's timestamp still
    occupies the buffer for that arrival: arrival events are always inserted
    before the competing service-completion would have been.
    """

    __slots__ = ("starts", "last_end", "capacity", "rate")

    def __init__(self, capacity, rate):
        from collections import deque
        self.starts = deque()
        self.last_end = 0.0
        self.capacity = capacity
        self.rate = rate

    def arrive(self, size_bytes, t):
        """Returns (admitted, service_start, service_end)."""
        starts = self.starts
        while starts and starts[0] < t:
            starts.popleft()
        if len(starts) >= self.capacity:
            return False, 0.0, 0.0
        start = t if t > self.last_end else self.last_end
        end = start + size_bytes * 8.0 / self.rate
        self.last_end = end
        starts.append(start)
        return True, start, end


# Queue variants.
V_DROPTAIL = 0
V_FAVOUR = 1
V_FAVOUR_PUSHOUT = 2

VARIANT_NAMES = {
    V_DROPTAIL: "droptail",
    V_FAVOUR: "favour",
    V_FAVOUR_PUSHOUT: "favour-pushout",
}
VARIANT_IDS = {name: vid for vid, name in VARIANT_NAMES.items()}


def make_queue(variant, capacity, trace=None):
    if variant == V_DROPTAIL:
        return DropTailQueue(capacity, trace)
    if variant == V_FAVOUR:
        return FavourQueue(capacity, False, trace)
    if variant == V_FAVOUR_PUSHOUT:
        return FavourQueue(capacity, True, trace)
    raise ValueError("unknown queue variant %r" % (variant,))


class NetParams:
    """Per-run network and TCP constants."""

    __slots__ = ("btl_rate", "edge_rate", "queue_capacity", "data_bytes",
                 "ack_bytes", "one_way_delays", "initial_rto", "min_rto",
                 "max_rto", "max_window")

    def __init__(self, btl_rate=1e7, edge_rate=1e8, queue_capacity=8,
                 data_bytes=1500, ack_bytes=40,
                 one_way_delays=(0.005, 0.015, 0.025, 0.035, 0.045,
                                 0.055, 0.065, 0.075, 0.085, 0.095),
                 initial_rto=3.0, min_rto=1.0, max_rto=64.0,
                 max_window=20.0):
        if btl_rate <= 0 or edge_rate <= 0:
            raise ValueError("link capacities must be positive")
        if any(d <= 0 for d in one_way_delays):
            raise ValueError("propagation delays must be positive")
        if queue_capacity < 0:
            raise ValueError("queue capacity must be >= 0")
        self.btl_rate = btl_rate
        self.edge_rate = edge_rate
        self.queue_capacity = queue_capacity
        self.data_bytes = data_bytes
        self.ack_bytes = ack_bytes
        self.one_way_delays = tuple(one_way_delays)
        self.initial_rto = initial_rto
        self.min_rto = min_rto
        self.max_rto = max_rto
        self.max_window = max_window


class TcpFlow:
    """Sender + receiver state for one simplified TCP transfer.

    seq 0 is the SYN; data packets are 1..size. A flow of size s therefore
    puts s+1 packets on the wire before any retransmission, and that total
    (size_total) is what length-indexed statistics use.
    """

    __slots__ = (
        # identity / workload
        "fid", "size", "iw", "direction", "persistent", "rtt_class",
        "arrival",
        # precomputed path constants (seconds)
        "half_prop", "e_ser_data", "rev_arr_extra", "ack_src_extra",
        "rev_deliver_extra",
        # source NIC serializer
        "src_busy",
        # sender state
        "state", "cwnd", "ssthresh", "next_seq", "acked", "dup_acks",
        "recover", "srtt", "rttvar", "has_srtt", "backoff",
        "rto_at", "chain_at", "rtt_seq", "rtt_sent_t", "syn_retx",
        # receiver state
        "rcv_next", "rcv_buf",
        # results
        "born", "done_t", "emitted", "n_retx", "n_rto", "n_fr",
        "n_drop", "n_pushout", "n_fav", "n_syn_arr", "n_syn_drop",
        "q_wait_sum", "q_wait_n",
    )

    def __init__(self, fid, arrival, size, rtt_class, direction, iw,
                 persistent, params):
        self.fid = fid
        self.size = size
        self.iw = iw
        self.direction = direction
        self.persistent = persistent
        self.rtt_class = rtt_class
        self.arrival = arrival

        p = params.one_way_delays[rtt_class]
        edge = params.edge_rate
        data_bits = params.data_bytes * 8.0
        ack_bits = params.ack_bytes * 8.0
        self.half_prop = p * 0.5
        self.e_ser_data = data_bits / edge
        # bottleneck tx done -> data at sink -> ACK at the reverse queue
        self.rev_arr_extra = data_bits / edge + p + ack_bits / edge
        # reverse tx done -> ACK back at the source
        self.ack_src_extra = ack_bits / edge + p * 0.5
        # reverse-direction data: tx done -> delivered -> ACK home again.
        # The returning ACK takes a plain delay path (it never crosses the
        # queue variant under test).
        self.rev_deliver_extra = (data_bits / edge + p * 0.5
                                  + ack_bits / edge + p
                                  + ack_bits / params.btl_rate
                                  + ack_bits / edge)

        self.src_busy = 0.0
        self.state = ST_SYN_SENT
        self.cwnd = 1.0
        self.ssthresh = INF
        self.next_seq = 1
        self.acked = -1
        self.dup_acks = 0
        self.recover = 0
        self.srtt = 0.0
        self.rttvar = 0.0
        self.has_srtt = False
        self.backoff = 0
        self.rto_at = INF
        self.chain_at = INF
        self.rtt_seq = -1
        self.rtt_sent_t = 0.0
        self.syn_retx = False
        self.rcv_next = 0
        self.rcv_buf = set()
        self.born = -1.0
        self.done_t = -1.0
        self.emitted = 0
        self.n_retx = 0
        self.n_rto = 0
        self.n_fr = 0
        self.n_drop = 0
        self.n_pushout = 0
        self.n_fav = 0
        self.n_syn_arr = 0
        self.n_syn_drop = 0
        self.q_wait_sum = 0.0
        self.q_wait_n = 0

    @property
    def size_total(self):
        """Flow length including the SYN (the L in length-indexed stats)."""
        return self.size + 1

    @property
    def completed(self):
        return self.state == ST_DONE

    @property
    def latency(self):
        """First SYN emission to the ACK of the last data packet."""
        if self.done_t < 0.0:
            return None
        return self.done_t - self.born


def build_flows(specs, params):
    """specs: iterable of (fid, arrival, size, rtt_class, direction, iw,
    persistent) tuples. Returns TcpFlow objects ready for SimRun."""
    flows = []
    for fid, arrival, size, rtt_class, direction, iw, persistent in specs:
        flows.append(TcpFlow(fid, arrival, size, rtt_class, direction, iw,
                             persistent, params))
    return flows


class SimRun:
    """One deterministic simulation: a dumbbell with the variant under test
    on the forward bottleneck and DropTail on the reverse bottleneck."""

    __slots__ = ("params", "loop", "flows", "fwd_q", "rev_link",
                 "fwd_busy", "fwd_in_service",
                 "btl_rate", "min_rto", "max_rto", "initial_rto",
                 "max_window", "completion_sink", "variant")

    def __init__(self, flows, params, variant, trace=None,
                 completion_sink=None):
        self.params = params
        self.variant = variant
        self.loop = EventLoop()
        self.flows = flows
        self.fwd_q = make_queue(variant, params.queue_capacity, trace)
        self.rev_link = FifoLink(params.queue_capacity, params.btl_rate)
        self.fwd_busy = False
        self.fwd_in_service = None
        self.btl_rate = params.btl_rate
        self.min_rto = params.min_rto
        self.max_rto = params.max_rto
        self.initial_rto = params.initial_rto
        self.max_window = params.max_window
        self.completion_sink = completion_sink
        for f in flows:
            self.loop.schedule(f.arrival, K_FLOW_START, f, 0)

    def run(self, horizon):
        # Drains the loop's heap in place: same ordering contract as
        # EventLoop.run_until, with the dispatch inlined.
        loop = self.loop
        heap = loop._heap
        pop = heapq.heappop
        processed = 0
        while heap:
            entry = heap[0]
            t = entry[0]
            if t > horizon:
                break
            pop(heap)
            loop.now = t
            processed += 1
            kind = entry[2]
            a = entry[3]
            if kind == K_ARRIVE_FWD:
                self._arrive_fwd(t, a)
            elif kind == K_ARRIVE_REV:
                self._arrive_rev(t, a)
            elif kind == K_TXDONE_FWD:
                self._txdone_fwd(t)
            elif kind == K_ACK_AT_SRC:
                self._on_ack(a, entry[4], t)
            elif kind == K_REV_DELIVER:
                self._on_ack(a, self._deliver(a, entry[4]), t)
            elif kind == K_TIMER:
                self._timer_pop(a, t)
            elif kind == K_FLOW_START:
                self._flow_start(a, t)
            else:
                raise RuntimeError("unknown event kind %r" % (kind,))
        loop.processed += processed
        if loop.now < horizon:
            loop.now = horizon
        return self

    # -- forward path (queue variant under test) ----------------------------

    def _arrive_fwd(self, t, pkt):
        f = pkt.flow
        if pkt.seq == 0:
            f.n_syn_arr += 1
        ok, victim = self.fwd_q.enqueue(pkt, t)
        if victim is not None:
            vf = victim.flow
            vf.n_drop += 1
            vf.n_pushout += 1
            if victim.seq == 0:
                vf.n_syn_drop += 1
        if pkt.favoured:
            # counted whether or not the arrival survived: favour status is
            # assigned by the whole-queue scan before any drop decision
            f.n_fav += 1
        if ok:
            if not self.fwd_busy:
                self._start_tx_fwd(t)
        else:
            f.n_drop += 1
            if pkt.seq == 0:
                f.n_syn_drop += 1

    def _start_tx_fwd(self, t):
        pkt = self.fwd_q.dequeue(t)
        f = pkt.flow
        f.q_wait_sum += t - pkt.enq_t
        f.q_wait_n += 1
        self.fwd_in_service = pkt
        self.fwd_busy = True
        self.loop.schedule(t + pkt.size * 8.0 / self.btl_rate,
                           K_TXDONE_FWD, None, 0)

    def _txdone_fwd(self, t):
        pkt = self.fwd_in_service
        self.loop.schedule(t + pkt.flow.rev_arr_extra, K_ARRIVE_REV, pkt, 0)
        if self.fwd_q.buffer:
            self._start_tx_fwd(t)
        else:
            self.fwd_busy = False
            self.fwd_in_service = None

    # -- reverse path (always DropTail) --------------------------------------

    def _arrive_rev(self, t, pkt):
        f = pkt.flow
        if f.direction == DIR_FWD:
            # Forward data was delivered rev_arr_extra ago (a per-flow
            # constant, so per-flow delivery order is preserved); the
            # returning packet is the cumulative ACK.
            ack = self._deliver(f, pkt.seq)
            ok, start, end = self.rev_link.arrive(self.params.ack_bytes, t)
            if ok:
                self.loop.schedule(end + f.ack_src_extra,
                                   K_ACK_AT_SRC, f, ack)
            return
        # Reverse-direction data crossing its own bottleneck.
        if pkt.seq == 0:
            f.n_syn_arr += 1
        ok, start, end = self.rev_link.arrive(pkt.size, t)
        if ok:
            f.q_wait_sum += start - t
            f.q_wait_n += 1
            self.loop.schedule(end + f.rev_deliver_extra,
                               K_REV_DELIVER, f, pkt.seq)
        else:
            f.n_drop += 1
            if pkt.seq == 0:
                f.n_syn_drop += 1

    # -- receiver -----------------------------------------------------------

    def _deliver(self, f, seq):
        if seq == f.rcv_next:
            nxt = f.rcv_next + 1
            buf = f.rcv_buf
            while nxt in buf:
                buf.discard(nxt)
                nxt += 1
            f.rcv_next = nxt
        elif seq > f.rcv_next:
            f.rcv_buf.add(seq)
        return f.rcv_next - 1

    # -- sender -------------------------------------------------------------

    def _flow_start(self, f, t):
        f.born = t
        self._emit(f, 0, False, t)
        self._arm(f, t + self._cur_rto(f))

    def _emit(self, f, seq, retx, t):
        f.emitted += 1
        if retx:
            f.n_retx += 1
            if seq == 0:
                f.syn_retx = True
            if f.rtt_seq >= 0 and seq <= f.rtt_seq:
                f.rtt_seq = -1  # Karn: never sample a retransmitted segment
        elif f.rtt_seq < 0:
            f.rtt_seq = seq
            f.rtt_sent_t = t
        pkt = Packet(f, seq, self.params.data_bytes, retx, t)
        leave = t if t > f.src_busy else f.src_busy
        leave += f.e_ser_data
        f.src_busy = leave
        kind = K_ARRIVE_FWD if f.direction == DIR_FWD else K_ARRIVE_REV
        self.loop.schedule(leave + f.half_prop, kind, pkt, 0)

    def _try_send(self, f, t):
        # Effective window is the congestion window clipped by the
        # receiver's advertised window (ns-2 style fixed cap).
        cw = f.cwnd
        mw = self.max_window
        w = int(cw if cw < mw else mw)
        size = f.size
        persistent = f.persistent
        while f.next_seq - 1 - f.acked < w:
            s = f.next_seq
            if not persistent and s > size:
                break
            f.next_seq = s + 1
            self._emit(f, s, False, t)

    def _cur_rto(self, f):
        if f.has_srtt:
            base = f.srtt + 4.0 * f.rttvar
            if base < self.min_rto:
                base = self.min_rto
        else:
            base = self.initial_rto
        if base > self.max_rto:
            base = self.max_rto
        rto = base * (1 << f.backoff)
        return rto if rto < self.max_rto else self.max_rto

    def _rtt_update(self, f, sample):
        if f.has_srtt:
            err = sample - f.srtt
            f.srtt += 0.125 * err
            f.rttvar = 0.75 * f.rttvar + 0.25 * (err if err >= 0.0 else -err)
        else:
            f.srtt = sample
            f.rttvar = sample * 0.5
            f.has_srtt = True

    def _on_ack(self, f, ack, t):
        state = f.state
        if state == ST_DONE:
            return
        if ack > f.next_seq - 1:
            raise RuntimeError(
                "flow %d acked seq %d but only sent up to %d"
                % (f.fid, ack, f.next_seq - 1))
        if state == ST_SYN_SENT:
            # The handshake reply; enter slow start with the initial window.
            if f.rtt_seq == 0:
                self._rtt_update(f, t - f.rtt_sent_t)
                f.rtt_seq = -1
            f.acked = 0
            f.state = ST_SLOW_START
            f.cwnd = float(f.iw)
            f.backoff = 0
            f.dup_acks = 0
            if not f.persistent and f.size == 0:
                self._finish(f, t)
                return
            self._try_send(f, t)
            self._arm(f, t + self._cur_rto(f))
            return
        if ack > f.acked:
            if f.rtt_seq >= 0 and ack >= f.rtt_seq:
                self._rtt_update(f, t - f.rtt_sent_t)
                f.rtt_seq = -1
            f.acked = ack
            f.dup_acks = 0
            f.backoff = 0
            if state == ST_FAST_REC:
                # Reno-style: any new ACK ends the recovery episode and
                # deflates the window back to ssthresh.
                f.state = ST_CONG_AVOID
                f.cwnd = f.ssthresh
            elif state == ST_SLOW_START:
                f.cwnd += 1.0
                if f.cwnd >= f.ssthresh:
                    f.state = ST_CONG_AVOID
            else:
                f.cwnd += 1.0 / f.cwnd
            if not f.persistent and ack >= f.size:
                self._finish(f, t)
                return
            self._try_send(f, t)
            self._arm(f, t + self._cur_rto(f))
            return
        f.dup_acks += 1
        if state == ST_FAST_REC:
            # Window inflation: each further duplicate ACK signals another
            # packet left the network, so new data may flow during recovery.
            f.cwnd += 1.0
            self._try_send(f, t)
        elif f.dup_acks == 3:
            flight = f.next_seq - 1 - f.acked
            half = flight * 0.5
            f.ssthresh = half if half > 2.0 else 2.0
            f.cwnd = f.ssthresh
            f.state = ST_FAST_REC
            f.recover = f.next_seq - 1
            f.n_fr += 1
            self._emit(f, f.acked + 1, True, t)
            self._arm(f, t + self._cur_rto(f))

    def _finish(self, f, t):
        f.state = ST_DONE
        f.done_t = t
        f.rto_at = INF
        if self.completion_sink is not None:
            self.completion_sink.write(
                "%.9f done %d %d\n" % (t, f.fid, f.size_total))

    # -- retransmission timer ------------------------------------------------
    #
    # Lazy timer chain: rto_at is the logical deadline, chain_at the earliest
    # pending heap entry. Re-arming only pushes when the new deadline is
    # earlier than the pending one; a pop before the deadline re-pushes at
    # the current deadline. Stale entries are harmless.

    def _arm(self, f, deadline):
        f.rto_at = deadline
        if deadline < f.chain_at:
            self.loop.schedule(deadline, K_TIMER, f, 0)
            f.chain_at = deadline

    def _timer_pop(self, f, t):
        f.chain_at = INF
        deadline = f.rto_at
        if deadline == INF or f.state == ST_DONE:
            return
        if t >= deadline:
            self._on_rto(f, t)
        else:
            self.loop.schedule(deadline, K_TIMER, f, 0)
            f.chain_at = deadline

    def _on_rto(self, f, t):
        f.n_rto += 1
        if f.backoff < 16:
            f.backoff += 1
        if f.state == ST_SYN_SENT:
            self._emit(f, 0, True, t)
        else:
            flight = f.next_seq - 1 - f.acked
            half = flight * 0.5
            f.ssthresh = half if half > 2.0 else 2.0
            f.cwnd = 1.0
            f.state = ST_SLOW_START
            f.dup_acks = 0
            self._emit(f, f.acked + 1, True, t)
        self._arm(f, t + self._cur_rto(f))


def simulate(specs, params, variant, horizon, trace=None,
             completion_sink=None):
    """Build flows from specs, run to the horizon, return the flow list."""
    flows = build_flows(specs, params)
    SimRun(flows, params, variant, trace, completion_sink).run(horizon)
    return flows
