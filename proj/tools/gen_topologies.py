#!/usr/bin/env python3
"""Writes synthetic switch fabrics with the size and degree profile of the
Getnet, Integra and Garr201001 networks (switch count, inter-switch edge
count, edge/backbone split, hosts per edge switch).

Backbone switches form a ring with evenly spaced chords; edge switches hang
off the backbone, some of them dual-homed to two neighbouring backbone
switches. The output is deterministic.
"""
import pathlib
import sys

PROFILES = {
    # name: (edge switches, backbone switches, undirected edges, dual-homed edge switches, hosts per edge)
    "getnet": (4, 3, 8, 1, 10),
    "integra": (16, 11, 36, 8, 5),
    "garr201001": (38, 16, 68, 10, 2),
}


def build(edge, backbone, edges, dual):
    bb = [f"b{i:02d}" for i in range(backbone)]
    es = [f"e{i:02d}" for i in range(edge)]
    links = []
    chords = edges - edge - dual - backbone
    if backbone == 3:
        links += [(bb[0], bb[1]), (bb[1], bb[2]), (bb[0], bb[2])]
        chords = edges - edge - dual - 3
        assert chords == 0
    else:
        links += [(bb[i], bb[(i + 1) % backbone]) for i in range(backbone)]
        have = {frozenset(l) for l in links}
        for c in range(chords):
            a = (c * backbone) // chords
            step = backbone // 2
            while frozenset((bb[a], bb[(a + step) % backbone])) in have:
                step += 1
            links.append((bb[a], bb[(a + step) % backbone]))
            have.add(frozenset(links[-1]))
    for i, e in enumerate(es):
        home = i % backbone
        links.append((e, bb[home]))
        if i < dual:
            links.append((e, bb[(home + 1) % backbone]))
    assert len(links) == edges, (len(links), edges)
    assert len({frozenset(l) for l in links}) == edges
    deg = {n: 0 for n in bb + es}
    for a, b in links:
        deg[a] += 1
        deg[b] += 1
    n = len(deg)
    avg = 2 * edges / n
    assert sum(1 for d in deg.values() if d < avg) == edge
    assert all(deg[b] >= avg for b in bb)
    return bb, es, links, avg


def main(out_dir):
    out = pathlib.Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    for name, (edge, backbone, edges, dual, hosts) in PROFILES.items():
        bb, es, links, avg = build(edge, backbone, edges, dual)
        lines = [
            f"# {name}: synthetic fabric, {edge + backbone} switches, {edges} inter-switch edges,",
            f"# average switch degree {avg:.2f}, {hosts} hosts per edge switch.",
            "# Generated by tools/gen_topologies.py.",
            "version 1",
            "defaults capacity=100M lo=1.0 lq=0.5 prop=1e-6",
            "nodes " + " ".join(bb),
            "nodes " + " ".join(es),
        ]
        lines += [f"edge {a} {b}" for a, b in links]
        lines.append(f"hosts_per_edge {hosts}")
        (out / f"{name}.topo").write_text("\n".join(lines) + "\n")


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else "data/topologies")
