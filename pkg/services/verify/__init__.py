from services.verify.operations import OPERATIONS, CheckContext, operation
from services.verify.runner import judge, run_check, run_suite, validate_suite
from services.verify.suites import ALIASES, BUILTIN_SUITES, random_spd_pairs, resolve_suite
