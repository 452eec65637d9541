"""Command-line front end: ``openshop <command> ...``.

Every decision command prints ``verdict: YES|NO|LIMIT method: <tag>`` first,
then optional witness blocks whose header lines start with ``#`` (comments in
the file formats).  Exit codes: 0 YES, 1 NO, 2 error, 3 search limit.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass, field
from pathlib import Path

from . import deadlock_states, exact_search, reachability, safety, two_machine, unit_capacity
from .fileformat import (ParseError, parse_schedule, parse_state, parse_system,
                         serialize_schedule, serialize_state, serialize_system)
from .reductions import (ReductionError, parse_dimacs, parse_triples,
                         sat_to_state_to_state, sat_witness_schedule, tdm_to_deadlock,
                         tdm_witness_deadlock)
from .random_instances import ProfileError, seeded_system
from .shop_model import InvalidStateError, replay

EXIT = {"YES": 0, "NO": 1, "LIMIT": 3}
FILE_BLOCKS = ("state", "schedule")


@dataclass
class Verdict:
    answer: str
    method: str
    blocks: list = field(default_factory=list)  # (name, text) pairs

    def render(self, witness: bool) -> str:
        out = [f"verdict: {self.answer} method: {self.method}"]
        if witness:
            for name, text in self.blocks:
                if name in FILE_BLOCKS:
                    out.append(f"# {name}")
                    out.extend(text.splitlines())
                else:
                    out.append(f"{name}: {text}")
        return "\n".join(out) + "\n"


class CliError(Exception):
    pass


def _read(path):
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise CliError(f"cannot read {path}: {exc.strerror}") from None


def _limits(args):
    return exact_search.SearchLimits(max_states=args.max_states, max_millis=args.max_millis)


def _schedule_block(system, schedule):
    return ("schedule", serialize_schedule(system, schedule))


def cmd_safe(system, state) -> Verdict:
    found = safety.find_blocking_set(system, state)
    if found is not None:
        return Verdict("NO", "blocking-set", [("blocking", " ".join(found.names(system)))])
    schedule = reachability.complete_schedule(system, state)
    return Verdict("YES", "blocking-set", [_schedule_block(system, schedule)])


def cmd_complete(system, state) -> Verdict:
    if not safety.is_safe(system, state):
        return cmd_safe(system, state)
    schedule = reachability.complete_schedule(system, state)
    return Verdict("YES", "greedy-completion", [_schedule_block(system, schedule)])


def cmd_reachable(system, state) -> Verdict:
    if not reachability.is_reachable(system, state):
        return Verdict("NO", "reversal")
    schedule = reachability.entry_schedule(system, state)
    return Verdict("YES", "reversal", [_schedule_block(system, schedule)])


def cmd_state_to_state(system, s, t, limits) -> Verdict:
    result = exact_search.state_to_state(system, s, t, limits)
    if result.answer is exact_search.Answer.YES:
        return Verdict("YES", "exact-bfs", [_schedule_block(system, result.witness)])
    return Verdict(result.answer.value, "exact-bfs",
                   [("explored", str(result.states_explored))])


def cmd_deadlock(system, exact=False, limits=exact_search.SearchLimits()) -> Verdict:
    if not exact and unit_capacity.check_applicable(system):
        cycle = unit_capacity.find_rainbow_cycle(unit_capacity.build_multigraph(system))
        if cycle is None:
            return Verdict("NO", "unit-capacity")
        state, schedule = unit_capacity.construct_deadlock_schedule(system, cycle)
        names = " ".join(system.machines[v].name for v in cycle.vertices)
        colors = " ".join(system.jobs[c].name for c in cycle.colors)
        return Verdict("YES", "unit-capacity", [
            ("cycle", f"{names} colors: {colors}"),
            ("state", serialize_state(system, state)),
            _schedule_block(system, schedule)])
    if not exact and two_machine.check_applicable(system):
        found, critical = two_machine.has_reachable_deadlock_2m(system)
        if not found:
            return Verdict("NO", "two-machine-lp")
        state, schedule = two_machine.construct_deadlock_witness(system, critical)
        names = " ".join(system.machines[i].name for i in sorted(critical.machines))
        return Verdict("YES", "two-machine-lp", [
            ("critical", names),
            ("state", serialize_state(system, state)),
            _schedule_block(system, schedule)])
    method = "exact-bfs"
    result = exact_search.reachable_deadlock_exact(system, limits)
    if result.answer is exact_search.Answer.LIMIT:
        # too many interleavings; list the deadlock states instead
        method = "exact-states"
        result = deadlock_states.reachable_deadlock_by_states(system, limits)
    if result.answer is exact_search.Answer.YES:
        return Verdict("YES", method, [
            ("state", serialize_state(system, result.final)),
            _schedule_block(system, result.witness)])
    return Verdict(result.answer.value, method, [("explored", str(result.states_explored))])


def _write_blocks(out_dir, verdict):
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    for name, text in verdict.blocks:
        if name not in FILE_BLOCKS:
            text += "\n"
        (out / f"{name}.txt").write_text(text, encoding="utf-8")


def _parse_assignment(text, n_vars):
    values = {}
    for word in text.replace("v", " ").split():
        lit = int(word)
        if lit == 0:
            continue
        if abs(lit) > n_vars:
            raise CliError(f"assignment mentions variable {abs(lit)} > {n_vars}")
        values[abs(lit)] = lit > 0
    missing = [i for i in range(1, n_vars + 1) if i not in values]
    if missing:
        raise CliError(f"assignment leaves variable {missing[0]} unset")
    return [values[i] for i in range(1, n_vars + 1)]


def cmd_gen(args) -> int:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    if args.kind == "sat":
        formula = parse_dimacs(_read(args.cnf))
        red = sat_to_state_to_state(formula)
        (out / "system.txt").write_text(serialize_system(red.system), encoding="utf-8")
        (out / "s.txt").write_text(serialize_state(red.system, red.s), encoding="utf-8")
        (out / "t.txt").write_text(serialize_state(red.system, red.t), encoding="utf-8")
        if args.witness:
            assignment = _parse_assignment(_read(args.witness), formula.n_variables)
            schedule = sat_witness_schedule(red, assignment)
            assert replay(red.system, red.s, schedule) == red.t
            (out / "schedule.txt").write_text(serialize_schedule(red.system, schedule),
                                              encoding="utf-8")
    else:
        instance = parse_triples(_read(args.triples))
        red = tdm_to_deadlock(instance)
        (out / "system.txt").write_text(serialize_system(red.system), encoding="utf-8")
        if args.witness:
            matching = parse_triples(_read(args.witness)).triples
            state, schedule, blocking = tdm_witness_deadlock(red, matching)
            (out / "state.txt").write_text(serialize_state(red.system, state),
                                           encoding="utf-8")
            (out / "schedule.txt").write_text(serialize_schedule(red.system, schedule),
                                              encoding="utf-8")
            (out / "blocking.txt").write_text(
                " ".join(blocking.names(red.system)) + "\n", encoding="utf-8")
    for path in sorted(out.iterdir()):
        print(path)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="openshop",
                                     description="Deadlock and reachability analysis "
                                                 "for multi-stage open shop systems.")
    sub = parser.add_subparsers(dest="command", required=True)

    def decision(name, help_text, states):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("system")
        for s in states:
            p.add_argument(s)
        p.add_argument("--witness", action="store_true", help="print witness blocks")
        p.add_argument("--out", help="also write witness blocks as files into this directory")
        return p

    decision("safe", "is the state safe?", ["state"])
    decision("reachable", "is the state reachable from the initial state?", ["state"])
    decision("complete", "schedule from a safe state to the final state", ["state"])
    for p in (decision("state-to-state", "is state t reachable from state s?", ["s", "t"]),
              decision("deadlock", "can the system reach a deadlock?", [])):
        p.add_argument("--max-states", type=int, default=1_000_000)
        p.add_argument("--max-millis", type=int, default=None)
    sub.choices["deadlock"].add_argument("--exact", action="store_true",
                                         help="skip the polynomial special cases")

    replay_p = sub.add_parser("replay", help="apply a schedule file to a state")
    replay_p.add_argument("system")
    replay_p.add_argument("state")
    replay_p.add_argument("schedule")

    gen = sub.add_parser("gen", help="generate hardness-reduction instances")
    gen_sub = gen.add_subparsers(dest="kind", required=True)
    sat = gen_sub.add_parser("sat", help="3-SAT formula -> state-to-state instance")
    sat.add_argument("--cnf", required=True, help="DIMACS CNF file")
    sat.add_argument("--witness", help="satisfying assignment (signed variable list)")
    sat.add_argument("--out", required=True)
    tdm = gen_sub.add_parser("3dm", help="3-dimensional matching -> deadlock instance")
    tdm.add_argument("--triples", required=True, help="lines 'a<i> b<j> c<k>'")
    tdm.add_argument("--witness", help="perfect matching in the same format")
    tdm.add_argument("--out", required=True)

    rnd = sub.add_parser("random", help="seeded random system (64-bit LCG)")
    rnd.add_argument("--seed", type=int, required=True)
    rnd.add_argument("--machines", type=int, required=True)
    rnd.add_argument("--jobs", type=int, required=True)
    rnd.add_argument("--max-cap", type=int, default=1)
    rnd.add_argument("--min-req", type=int, default=0)
    rnd.add_argument("--max-req", type=int, default=None)
    return parser


def run(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "random":
            system = seeded_system(args.seed, args.machines, args.jobs, args.max_cap,
                                   args.min_req, args.max_req)
            sys.stdout.write(serialize_system(system))
            return 0
        if args.command == "gen":
            return cmd_gen(args)
        system = parse_system(_read(args.system))
        if args.command == "replay":
            start = parse_state(system, _read(args.state))
            end = replay(system, start, parse_schedule(system, _read(args.schedule)))
            sys.stdout.write(serialize_state(system, end))
            return 0
        if args.command == "deadlock":
            verdict = cmd_deadlock(system, args.exact, _limits(args))
        elif args.command == "state-to-state":
            verdict = cmd_state_to_state(system, parse_state(system, _read(args.s)),
                                         parse_state(system, _read(args.t)), _limits(args))
        else:
            state = parse_state(system, _read(args.state))
            handler = {"safe": cmd_safe, "reachable": cmd_reachable,
                       "complete": cmd_complete}[args.command]
            verdict = handler(system, state)
    except (CliError, ParseError, ReductionError, ProfileError, InvalidStateError,
            ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    sys.stdout.write(verdict.render(args.witness))
    if args.out:
        _write_blocks(args.out, verdict)
    return EXIT[verdict.answer]


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
