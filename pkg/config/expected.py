"""
iOCR Reference Figures - Single Source of Truth
Accuracy figures and corpus sizes every experiment is checked against
"""


class ReferenceFigures:
    """
    Single source of truth for the mock-election reference results.

    The noise channel is calibrated from the per-line error counts of the
    degraded-image runs: 60 of 5000 lines at 50% quality and 420 of 5000
    lines at 20% quality. Change a figure here to update every experiment.
    """

    # Image quality (percent) -> calibrated per-line corruption rate
    QUALITY_LINE_ERROR_RATES = {
        100: 0.0,
        50: 0.012,
        20: 0.084,
    }

    # Raw OCR without post-processing, exact line equality
    RAW_LINE_ACCURACY = {
        100: 1.0,
        50: 0.988,
        20: 0.916,
    }

    IOCR_LINE_ACCURACY = 1.0

    # Half a percentage point either side of the raw accuracy
    RAW_ACCURACY_TOLERANCE = 0.005
    ANOVA_MIN_F = 10.0
    BINOMIAL_CONFIDENCE = 0.99

    # Corpus layout of the first experiment, per ID variant
    UNIQUE_BALLOTS = 25
    DUPLICATES = 20
    WRITEINS_PER_SET = 5

    # Similar-name ballots added per ID variant
    SIMILAR_PAIR = ("Mark Day", "Mark May")
    SIMILAR_PAIR_COUNTS = {"Mark May": 30, "Mark Day": 20}

    # Edits a write-in read from a corrupted ballot may differ by and still count
    NOISY_WRITEIN_TOLERANCE = 2
