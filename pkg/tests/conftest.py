import numpy as np
import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "suite",
    deadline=None,
    derandomize=True,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("suite")

# Five 2-d points whose tight box, sub-box cell counts, and two-block coverage
# estimate are frozen reference values used across the suite.
FIVE_POINTS = [(0.1, 0.5), (0.1, 1.0), (0.2, 0.8), (0.6, 0.2), (1.0, 0.3)]
FIVE_BLOCK_A = [(0.1, 0.5), (0.1, 1.0), (0.2, 0.8)]
FIVE_BLOCK_B = [(0.6, 0.2), (1.0, 0.3)]

# Toy two-class run: output-layer activations with true/predicted labels.
# Rows 1-4: class 0 classified correctly; rows 5-6: class 1 misclassified as 0;
# rows 7-8: class 1 classified correctly.
TOY_FEATURES = [
    (0.078, 0.062),
    (0.222, 0.162),
    (0.690, 0.610),
    (0.790, 0.710),
    (0.289, 0.281),
    (0.389, 0.381),
    (0.566, 0.614),
    (0.666, 0.714),
]
TOY_TRUE = [0, 0, 0, 0, 1, 1, 1, 1]
TOY_PRED = [0, 0, 0, 0, 0, 0, 1, 1]

# Boxes the class-0 monitor must derive from the rows above with
# tau_correct in (0.605803, 0.962349] and tau_incorrect = 1.0.
TOY_CORRECT_BOXES = [
    ((0.078, 0.222), (0.062, 0.162)),
    ((0.690, 0.790), (0.610, 0.710)),
]
TOY_INCORRECT_BOX = ((0.289, 0.389), (0.281, 0.381))


@pytest.fixture
def five_points():
    return [list(p) for p in FIVE_POINTS]


@pytest.fixture
def toy_records():
    from boxmon.monitor import FeatureRecord

    return [
        FeatureRecord(np.array(f), t, p)
        for f, t, p in zip(TOY_FEATURES, TOY_TRUE, TOY_PRED)
    ]


def write_feature_csv(path, features, true_labels, pred_labels):
    lines = []
    for f, t, p in zip(features, true_labels, pred_labels):
        lines.append(",".join([str(int(t)), str(int(p))] + [repr(float(v)) for v in f]))
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path
