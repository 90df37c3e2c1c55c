"""Numerical laboratory for singular integral operators on atomic measures.

The heavy lifting lives in the compiled extension; this package re-exports it
and adds small conveniences for reports.
"""

import json

try:
    from . import _czlab as _impl  # installed layout: extension inside the package
except ImportError:
    import _czlab as _impl  # build-tree layout: extension on sys.path

Kernel = _impl.Kernel
Measure = _impl.Measure
acceptance_suite = _impl.acceptance_suite
apply = _impl.apply
ball_mass = _impl.ball_mass
build_identifier = _impl.build_identifier
cauchy_kernel = _impl.cauchy_kernel
conj_cauchy_kernel = _impl.conj_cauchy_kernel
defect = _impl.defect
growth_constant = _impl.growth_constant
kernel_from_spec = _impl.kernel_from_spec
load_measure = _impl.load_measure
measure_from_spec = _impl.measure_from_spec
operator_norm = _impl.operator_norm
quick_suite = _impl.quick_suite
rescale = _impl.rescale
riesz_kernel = _impl.riesz_kernel
run_config = _impl.run_config
run_config_file = _impl.run_config_file
save_measure = _impl.save_measure
ttilde_one = _impl.ttilde_one

__all__ = [
    "Kernel",
    "Measure",
    "acceptance_suite",
    "apply",
    "ball_mass",
    "build_identifier",
    "cauchy_kernel",
    "conj_cauchy_kernel",
    "defect",
    "growth_constant",
    "kernel_from_spec",
    "load_measure",
    "measure_from_spec",
    "operator_norm",
    "quick_suite",
    "rescale",
    "riesz_kernel",
    "run_config",
    "run_config_file",
    "run_report",
    "save_measure",
    "ttilde_one",
]


def run_report(config, with_timing=True):
    """Run one experiment from a config dict and return the report as a dict."""
    return json.loads(run_config(json.dumps(config), with_timing))
