from matcher.graph import Graph, GraphBuilder
from matcher.matching import Matching, MatchingKind, classify
from matcher.sat import Assignment, CnfFormula
from matcher.solvers import max_matching_number
