"""Lane-parallel sampling-based motion planning toolkit."""

__version__ = "0.1.0"

from .lanes import (DEFAULT_WIDTH, Config, ConfigBlock, LaneMask, aos_from_soa,
                    as_config, interpolate_lanes, l2_distance, sincos_lanes,
                    soa_from_aos)
from .robot import (JointSpec, KinematicTree, SelfCollisionPairs, Sphere,
                    SphereModel, SphereModelError, UrdfError,
                    compute_coarse_sphere, default_self_collision_pairs,
                    load_sphere_model, parse_urdf)
from .trace import SphereKey, TraceGraph, evaluate_graph, optimize_graph, trace_kinematics
from .program import (CheckMarker, KinematicProgram, Scratch, dump_program,
                      evaluate_program, schedule_program)
from .collision import (BoxObstacle, CapsuleObstacle, Environment,
                        EnvironmentFormatError, SphereObstacle,
                        ValidationContext, load_environment,
                        sphere_vs_capsule_lanes, sphere_vs_cuboid_lanes,
                        sphere_vs_sphere_lanes, validate_block)
from .motion import discretization_count, raked_motion_check, validate_motion_rake
from .halton import HaltonSampler, halton_next, radical_inverse
from .nn import NNIndex
from .planners import (InvalidProblemError, Path, PlannerSettings, PlanningProblem,
                       PlanResult, Robot, build_robot, prm, revalidate_path,
                       rrt_connect)
from .simplify import SimplifySettings, bspline_smooth, path_cost, shortcut, simplify_path
from .problems import ProblemCase, ProblemSet, ProblemSetError, load_problem_set, save_problem_set
from .bench import (RunRecord, SummaryStats, format_ms, format_success,
                    run_benchmark, summarize_stats)
