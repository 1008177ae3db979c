from typing import Optional, Sequence

from langgraph.graph import END, StateGraph

from pointspectra.algebra.permact import PairPermutation
from pointspectra.geometry.configuration import PointConfiguration
from pointspectra.graph.nodes import cosets_node, groups_node, hypotheses_node, search_node, verdict_node
from pointspectra.graph.state import CertificationState
from pointspectra.services.storage import CertificationReport


def build_graph():
    """
    Constructs the certification graph: hypotheses, then either the verdict
    directly or groups -> cosets -> search -> verdict.
    """
    workflow = StateGraph(CertificationState)

    workflow.add_node("hypotheses", hypotheses_node)
    workflow.add_node("groups", groups_node)
    workflow.add_node("cosets", cosets_node)
    workflow.add_node("search", search_node)
    workflow.add_node("verdict", verdict_node)

    workflow.set_entry_point("hypotheses")

    def route_decision(state: CertificationState):
        return "groups" if state.get("applicable") else "verdict"

    workflow.add_conditional_edges(
        "hypotheses",
        route_decision,
        {
            "groups": "groups",
            "verdict": "verdict",
        },
    )

    workflow.add_edge("groups", "cosets")
    workflow.add_edge("cosets", "search")
    workflow.add_edge("search", "verdict")
    workflow.add_edge("verdict", END)

    return workflow.compile()


_graph = None


def run_certification(
    P: PointConfiguration,
    stabilizer: Optional[Sequence[PairPermutation]] = None,
    budget: Optional[int] = None,
) -> CertificationReport:
    global _graph
    if _graph is None:
        _graph = build_graph()
    state = _graph.invoke(
        {
            "configuration": P,
            "stabilizer": None if stabilizer is None else list(stabilizer),
            "budget": budget,
        }
    )
    return state["report"]
