import threading

import pytest

from rsm import (
    Budgets,
    BudgetError,
    ElementRef,
    GroundSets,
    ObjectiveContractError,
    ObjectiveHandle,
    StructuralError,
    evaluate,
    make_sequence,
    marginal,
)
from rsm.core import canonical, pad, sequence_from_set, with_step


def test_ground_sets_from_sizes_assigns_consecutive_ids():
    # [TRIVIAL]
    g = GroundSets.from_sizes([2, 3])
    assert [e.global_id for e in g.all_elements()] == [0, 1, 2, 3, 4]
    assert g.step(2)[0] == ElementRef(2, 2, 0)
    assert g.horizon == 2
    assert ElementRef(4, 2, 2) in g
    assert g.truncated(1).horizon == 1


@pytest.mark.parametrize(
    "per_step",
    [
        (),
        ((),),
        ((ElementRef(0, 2, 0),),),
        ((ElementRef(0, 1, 0),), (ElementRef(0, 2, 0),)),
    ],
)
def test_ground_sets_reject_malformed(per_step):
    # [TRIVIAL]
    with pytest.raises(StructuralError):
        GroundSets(per_step)


def test_budgets_validate():
    # [TRIVIAL] 0 <= beta <= alpha <= |V_t|
    g = GroundSets.from_sizes([3, 3])
    Budgets.uniform(3, 3, 2).validate(g)
    Budgets.uniform(0, 0, 2).validate(g)
    for bad in (Budgets.uniform(4, 1, 2), Budgets.uniform(2, 3, 2), Budgets((2,), (1,)), Budgets((2, 2), (-1, 0))):
        with pytest.raises(BudgetError):
            bad.validate(g)


def test_canonical_order_is_global_id():
    # [TRIVIAL]
    g = GroundSets.from_sizes([4])
    assert canonical(reversed(g.step(1))) == list(g.step(1))


def test_sequence_helpers():
    # [TRIVIAL]
    g = GroundSets.from_sizes([2, 2])
    a, b = g.step(1)
    c, d = g.step(2)
    assert pad(make_sequence({a}), 3) == (frozenset({a}), frozenset(), frozenset())
    assert sequence_from_set([a, d], 2) == (frozenset({a}), frozenset({d}))
    assert with_step((frozenset({a}),), 2, [c]) == (frozenset({a}), frozenset({c}))
    assert with_step((frozenset({a}),), 1, [b]) == (frozenset({a, b}),)
    with pytest.raises(StructuralError):
        sequence_from_set([d], 1)


def test_empty_sequence_is_zero(cover3):
    # [TRIVIAL] f(empty) = 0 by contract
    obj, g, _ = cover3
    assert evaluate(obj, ()) == 0.0
    assert evaluate(obj, (frozenset(),)) == 0.0


def test_evaluate_modular_and_coverage(mod321, cover3):
    # modular: [TRIVIAL]; coverage union {u1,u2,u3}: [DERIVED]
    obj, _, (a, b, _) = mod321
    assert evaluate(obj, make_sequence({a, b})) == 5.0
    obj, _, (a, b, _) = cover3
    assert evaluate(obj, make_sequence({a, b})) == 3.0


def test_evaluate_counts_exactly_one_call(cover3):
    # [TRIVIAL]
    obj, _, (a, b, _) = cover3
    before = obj.eval_count
    evaluate(obj, make_sequence({a}))
    evaluate(obj, ())
    assert obj.eval_count == before + 2


def test_marginal_values_and_call_count(mod321, cover3):
    # modular: [TRIVIAL]; coverage gains only u3: [DERIVED]
    obj, _, (a, b, _) = mod321
    assert marginal(obj, make_sequence({a}), {b}) == 2.0
    obj, _, (a, b, c) = cover3
    before = obj.eval_count
    assert marginal(obj, make_sequence({a}), {b}) == 1.0
    assert obj.eval_count == before + 2
    assert marginal(obj, make_sequence({a}), set()) == 0.0


def test_marginal_rejects_overlap(cover3):
    # [TRIVIAL]
    obj, _, (a, _, _) = cover3
    with pytest.raises(StructuralError):
        marginal(obj, make_sequence({a}), {a})


def test_structural_errors(cover3):
    # [TRIVIAL]
    obj, g, (a, _, _) = cover3
    stranger = ElementRef(99, 1, 0)
    with pytest.raises(StructuralError):
        evaluate(obj, make_sequence({stranger}))
    with pytest.raises(StructuralError):
        evaluate(obj, (frozenset(), frozenset({a})))  # a belongs to step 1
    with pytest.raises(StructuralError):
        evaluate(obj, (frozenset(),) * 2)  # longer than the horizon


def test_contract_errors():
    # [TRIVIAL]
    g = GroundSets.from_sizes([2])
    a, b = g.step(1)
    nan = ObjectiveHandle(lambda s: float("nan") if any(s) else 0.0, g)
    with pytest.raises(ObjectiveContractError):
        nan(make_sequence({a}))
    neg = ObjectiveHandle(lambda s: -1.0 * len(s[0]), g)
    with pytest.raises(ObjectiveContractError):
        neg(make_sequence({a}))


def test_normalization_subtracts_raw_empty():
    # [TRIVIAL] f(X) = raw(X) - raw(empty)
    g = GroundSets.from_sizes([2])
    a, b = g.step(1)
    obj = ObjectiveHandle(lambda s: 10.0 + len(s[0]), g)
    assert obj(make_sequence({a, b})) == 2.0
    assert obj(()) == 0.0


def test_cache_keeps_logical_counts():
    # [TRIVIAL] memoization must not change eval_count
    g = GroundSets.from_sizes([2])
    a, _ = g.step(1)
    raw_calls = []
    obj = ObjectiveHandle(lambda s: raw_calls.append(1) or float(len(s[0])), g, cache=True)
    for _ in range(3):
        obj(make_sequence({a}))
    assert obj.eval_count == 3
    assert len(raw_calls) == 2  # empty baseline + one real evaluation


def test_singleton_cache(cover3):
    # [TRIVIAL]
    obj, _, (a, _, _) = cover3
    assert obj.singleton(a) == (2.0, True)
    assert obj.singleton(a) == (2.0, False)


def test_eval_count_is_thread_safe(cover3):
    # [TRIVIAL]
    obj, _, (a, b, _) = cover3
    obj.reset_count()
    seq = make_sequence({a, b})

    def work():
        for _ in range(500):
            obj(seq)

    threads = [threading.Thread(target=work) for _ in range(4)]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    assert obj.eval_count == 2000
