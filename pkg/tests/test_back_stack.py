import random

import pytest

from core.back_stack import InstanceRef, activity_ids, finish_top, pop_back, push_for_launch
from core.exceptions import EmptyBackStackError


def _stack(*names):
    return tuple(InstanceRef(name, serial) for serial, name in enumerate(names, start=1))


@pytest.mark.parametrize("before, activity, mode, after, started", [
    (("A",), "B", "Standard", ("A", "B"), True),
    (("A",), "A", "Standard", ("A", "A"), True),
    (("A",), "A", "SingleTop", ("A",), False),
    (("A", "B"), "A", "SingleTop", ("A", "B", "A"), True),
    (("A", "B"), "A", "SingleTask", ("A",), False),
    (("A",), "B", "SingleTask", ("A", "B"), True),
])
def test_launch_rules(before, activity, mode, after, started):
    stack, created = push_for_launch(_stack(*before), activity, mode, serial=99)
    assert activity_ids(stack) == after
    assert created is started


def test_new_instance_uses_given_serial():
    stack, _ = push_for_launch(_stack("A"), "A", "Standard", serial=7)
    assert stack[-1] == InstanceRef("A", 7)
    assert stack[0] != stack[-1]


def test_single_task_keeps_topmost_instance():
    before = _stack("A", "B", "A", "C")
    stack, created = push_for_launch(before, "A", "SingleTask", serial=9)
    assert stack == before[:3]
    assert not created


def test_single_top_keeps_the_same_instance():
    before = _stack("A", "B")
    stack, created = push_for_launch(before, "B", "SingleTop", serial=3)
    assert stack is before
    assert not created


def test_pop_and_finish_drop_top():
    stack = _stack("A", "B")
    assert activity_ids(pop_back(stack)) == ("A",)
    assert activity_ids(finish_top(stack)) == ("A",)
    assert pop_back(_stack("A")) == ()


@pytest.mark.parametrize("operation", [pop_back, finish_top])
def test_empty_stack_raises(operation):
    with pytest.raises(EmptyBackStackError):
        operation(())


def test_launch_postconditions_hold_for_random_sequences():
    rng = random.Random(11)
    activities = ("A", "B", "C")
    modes = ("Standard", "SingleTop", "SingleTask")
    for _ in range(200):
        stack = _stack("A")
        serial = 2
        for _ in range(12):
            activity, mode = rng.choice(activities), rng.choice(modes)
            before = stack
            stack, created = push_for_launch(stack, activity, mode, serial)
            assert stack[-1].activity == activity
            if created:
                assert stack[:-1] == before
                assert stack[-1].serial == serial
                serial += 1
            else:
                assert before[:len(stack)] == stack
        assert len(set(stack)) == len(stack)
