from stochsched.assignment import GreedyDispatcher, greedy_assignment, run_ga_policy
from stochsched.bounds import build_lpr, scale_instance, single_machine_lower_bound, solve_lpr
from stochsched.certificate import build_dual_certificate, verify_dual_certificate
from stochsched.densities import density_f_delta, smallest_valid_c, verify_density_conditions
from stochsched.distributions import Distribution
from stochsched.instance import InstanceSpec, Job, UnrelatedInstance, generate_instance, load_instance
from stochsched.policies import AlphaVectorPolicy, FixedAlphaPolicy, RandomAlphaPolicy, dsos_policy
from stochsched.simulation import Comparator, empirical_ratio_report, monte_carlo
from stochsched.virtual_schedule import VirtualSchedule


__all__ = ["AlphaVectorPolicy", "Comparator", "Distribution", "FixedAlphaPolicy", "GreedyDispatcher", "InstanceSpec",
           "Job", "RandomAlphaPolicy", "UnrelatedInstance", "VirtualSchedule", "build_dual_certificate", "build_lpr",
           "density_f_delta", "dsos_policy", "empirical_ratio_report", "generate_instance", "greedy_assignment",
           "load_instance", "monte_carlo", "run_ga_policy", "scale_instance", "single_machine_lower_bound",
           "smallest_valid_c", "solve_lpr", "verify_density_conditions", "verify_dual_certificate"]
