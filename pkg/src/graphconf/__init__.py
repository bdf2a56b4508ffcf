"""Configuration spaces of graphs with sinks: combinatorial models,
exact integer homology, and explicit generating cycles."""

from .graphs import (Graph, GraphSpec, GraphSpecError, banana, build_graph,
                     circle, complete, complete_bipartite, dimension_bound,
                     dump_graph, essential_vertices, graph_from_doc,
                     graph_to_doc, h_graph, interval, load_graph,
                     parse_graph_spec, star, subdivide_edge, wedge)
from .model import (CapExceededError, Chain, CubeComplex, boundary_chain,
                    boundary_of_cell, cell_dimension, cell_is_valid,
                    corner_configurations, enumerate_cells, face, make_cell,
                    relabel_cell, relabel_chain)
from .homology import (HomologySummary, SparseIntMatrix, boundary_matrix,
                       certify_integral_generation, class_span_rank,
                       connected_components, euler_characteristic, homology,
                       integer_kernel_basis, is_boundary, is_cycle,
                       rank_over_rationals, smith_normal_form, solve_in_image)
from .cycles import (BasicClasses, CircuitSpec, CycleConstructionError,
                     EnumerationCaps, HSpec, StarSpec, chain_to_doc,
                     circuit_cycle, circuit_cycle_chain,
                     enumerate_basic_classes, h_cycle, h_cycle_chain,
                     loop_augmented_nonproduct, nonproduct_cycle,
                     nonproduct_cycle_chain, parked_chain, product_chain,
                     push_in, star4_relation, star4_relation_chain, star_cycle,
                     star_cycle_chain)

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
