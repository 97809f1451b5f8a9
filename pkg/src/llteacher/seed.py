"""Demo fixtures: one instructor, two students, and the two sample
assignments used throughout the docs (a recall one on R data types and a
discovery one leading to the bootstrap)."""

from __future__ import annotations

from dataclasses import dataclass

from llteacher.auth import hash_credential
from llteacher.domain.models import Homework, Mode, Role, User, new_id, utcnow
from llteacher.errors import NotFound
from llteacher.store import Store

DATA_TYPES_TITLE = "Data types"
DATA_TYPES_STATEMENT = (
    "In your own words, explain the difference between the basic data types "
    "you have met in R: numeric, character, logical, and factor. For each "
    "one, give a short example of a variable you might store with it, and "
    "explain what goes wrong if you pick the wrong type (for instance, "
    "storing postal codes as numbers). Discuss your answer with the tutor "
    "until you can state each difference precisely."
)
DATA_TYPES_SOLUTION = (
    "A complete answer covers: numeric vectors hold real numbers and support "
    "arithmetic (e.g. heights in cm); integer is a special case. Character "
    "vectors hold text; arithmetic is meaningless on them, and identifiers "
    "such as postal codes belong here because leading zeros and non-numeric "
    "symbols must survive. Logical vectors hold TRUE/FALSE and arise from "
    "comparisons; they can be summed because TRUE counts as 1. A factor "
    "stores a categorical variable: the observed levels are stored once and "
    "each observation is an integer code pointing at a level, which is why "
    "factors are the right type for grouping variables in models and plots. "
    "Common mistake to probe: treating a factor as numeric via as.numeric() "
    "returns the internal codes, not the level labels."
)

BOOTSTRAP_TITLE = "Discovering Bootstrap"
BOOTSTRAP_STATEMENT = (
    "You collected a single sample of 40 household incomes and computed the "
    "median. How sure should you be about that number? You only have this "
    "one sample and cannot collect more data. Brainstorm with the tutor: is "
    "there a way to use the sample you already have to understand how much "
    "the median would vary if you could repeat the study? You can run R "
    "code while you think."
)
BOOTSTRAP_SOLUTION = (
    "Guidance script. Goal: the student invents resampling with replacement "
    "(the bootstrap) before it is named in class. Stage 1: ask what they "
    "would do with unlimited data (expected: repeat the study many times "
    "and look at the spread of medians). Stage 2: ask what stands in for "
    "the population when only the sample is available; nudge toward the "
    "sample being the best available stand-in for the population. Stage 3: "
    "have them draw new samples of size 40 FROM their own sample, with "
    "replacement, in R (sample(x, size = 40, replace = TRUE)), compute the "
    "median of each, and describe the histogram of many such medians. "
    "Stage 4: connect the spread of that histogram to the uncertainty of "
    "the original estimate. Never name the technique before the student "
    "describes it; if they propose a z approximation, ask whether its "
    "assumptions hold for a skewed income distribution at n = 40. "
    "Reference: course textbook, chapter on resampling methods, sections "
    "1-3."
)


@dataclass(frozen=True)
class DemoAccount:
    name: str
    credential: str
    role: Role


DEMO_ACCOUNTS = [
    DemoAccount("instructor", "teach-me-2026", Role.INSTRUCTOR),
    DemoAccount("alice", "alice-pass", Role.STUDENT),
    DemoAccount("bob", "bob-pass", Role.STUDENT),
]


def seed_demo(store: Store) -> dict[str, str]:
    """Load demo users and the two sample assignments; idempotent by name.

    Returns a map of created/found display names to user ids.
    """
    users: dict[str, str] = {}
    for account in DEMO_ACCOUNTS:
        try:
            user = store.get_user_by_name(account.name)
        except NotFound:
            user = User(
                id=new_id(),
                display_name=account.name,
                role=account.role,
                credential_hash=hash_credential(account.credential),
            )
            store.put_user(user)
        users[account.name] = user.id

    existing_titles = {hw.title for hw in store.list_homework()}
    instructor_id = users["instructor"]
    if DATA_TYPES_TITLE not in existing_titles:
        store.put_homework(
            Homework(
                id=new_id(),
                title=DATA_TYPES_TITLE,
                problem_statement=DATA_TYPES_STATEMENT,
                solution=DATA_TYPES_SOLUTION,
                mode=Mode.RECALL,
                created_by=instructor_id,
                created_at=utcnow(),
            )
        )
    if BOOTSTRAP_TITLE not in existing_titles:
        store.put_homework(
            Homework(
                id=new_id(),
                title=BOOTSTRAP_TITLE,
                problem_statement=BOOTSTRAP_STATEMENT,
                solution=BOOTSTRAP_SOLUTION,
                mode=Mode.DISCOVERY,
                created_by=instructor_id,
                created_at=utcnow(),
            )
        )
    return users
