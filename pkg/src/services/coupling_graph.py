"""DOT export of the laser coupling between symmetric states."""
import string
from collections import defaultdict
from typing import Dict, List

import numpy as np

from src.services.hamiltonian import HermitianMatrix
from src.services.symmetric_basis import SymmetricBasis

_EDGE_TOLERANCE = 1e-12


def node_labels(basis: SymmetricBasis) -> List[str]:
    """Excitation-number labels, with _A, _B, ... suffixes for degenerate counts."""
    counts = basis.excitation_counts
    totals: Dict[int, int] = defaultdict(int)
    for n in counts:
        totals[int(n)] += 1
    seen: Dict[int, int] = defaultdict(int)
    labels = []
    for n in counts:
        n = int(n)
        if totals[n] > 1:
            labels.append(f"{n}_{string.ascii_uppercase[seen[n] % 26]}")
        else:
            labels.append(str(n))
        seen[n] += 1
    return labels


def export_coupling_graph(basis: SymmetricBasis, hamiltonian: HermitianMatrix) -> str:
    """Undirected DOT graph, one column per excitation number.

    Edges carry |⟨S_b|H₀|S_a⟩| as weight; zero entries and the diagonal are skipped.
    """
    labels = node_labels(basis)
    counts = basis.excitation_counts
    matrix = hamiltonian.dense()
    lines = [
        "graph coupling {",
        "  rankdir=LR;",
        '  node [shape=circle, fontname="Helvetica"];',
    ]
    for n in np.unique(counts):
        members = " ".join(f'"{labels[i]}";' for i in np.nonzero(counts == n)[0])
        lines.append(f"  {{ rank=same; {members} }}")
    for i in range(len(basis)):
        for j in range(i + 1, len(basis)):
            weight = abs(matrix[i, j])
            if weight > _EDGE_TOLERANCE:
                lines.append(
                    f'  "{labels[i]}" -- "{labels[j]}" '
                    f'[weight={weight:.12g}, label="{weight:.4g}"];'
                )
    lines.append("}")
    return "\n".join(lines) + "\n"
