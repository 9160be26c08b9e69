//! Deterministic SVG rendering: the plabic graph via a Tutte embedding
//! (boundary marked points pinned on a circle, internal nodes at the
//! harmonic average of their neighbours), and the quiver drawn over the
//! same layout with a vertex at each face barycenter.  Frozen vertices
//! are diamonds and frozen arrows are bold.

use std::fmt::Write as _;

use pdlab_core::error::{Error, Result};
use pdlab_core::plabic::{Color, PlabicGraph, Side};
use pdlab_core::quiver::IceQP;

const SIZE: f64 = 520.0;
const CENTER: f64 = SIZE / 2.0;
const RADIUS: f64 = 210.0;

type Point = (f64, f64);

/// Marked point k (1-based), clockwise from the top of the disc.
fn marked_point(k: usize, n: usize) -> Point {
    let angle =
        std::f64::consts::FRAC_PI_2 - 2.0 * std::f64::consts::PI * ((k - 1) as f64) / (n as f64);
    (CENTER + RADIUS * angle.cos(), CENTER - RADIUS * angle.sin())
}

/// Point on the boundary circle midway along the arc from k to k+1.
fn arc_midpoint(k: usize, n: usize) -> Point {
    let angle =
        std::f64::consts::FRAC_PI_2 - 2.0 * std::f64::consts::PI * ((k as f64) - 0.5) / (n as f64);
    (CENTER + RADIUS * angle.cos(), CENTER - RADIUS * angle.sin())
}

/// Solve the Tutte system: every internal node sits at the average of
/// its neighbours, with legs anchored at their marked points.
fn node_positions(g: &PlabicGraph) -> Result<Vec<Point>> {
    let nn = g.nodes.len();
    let mut a = vec![vec![0.0f64; nn]; nn];
    let mut bx = vec![0.0f64; nn];
    let mut by = vec![0.0f64; nn];
    for e in &g.edges {
        a[e.a][e.a] += 1.0;
        a[e.b][e.b] += 1.0;
        a[e.a][e.b] -= 1.0;
        a[e.b][e.a] -= 1.0;
    }
    for (k0, &v) in g.legs.iter().enumerate() {
        let (x, y) = marked_point(k0 + 1, g.n);
        a[v][v] += 1.0;
        bx[v] += x;
        by[v] += y;
    }
    // Gaussian elimination with partial pivoting; the system is the
    // grounded Laplacian of a boundary-connected graph, hence regular.
    for col in 0..nn {
        let pivot = (col..nn)
            .max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))
            .expect("nonempty range");
        if a[pivot][col].abs() < 1e-9 {
            return Err(Error::Internal(
                "layout system is singular (disconnected diagram?)".into(),
            ));
        }
        a.swap(col, pivot);
        bx.swap(col, pivot);
        by.swap(col, pivot);
        let lead = a[col].clone();
        for row in 0..nn {
            if row == col {
                continue;
            }
            let f = a[row][col] / lead[col];
            if f == 0.0 {
                continue;
            }
            for (x, p) in a[row][col..nn].iter_mut().zip(&lead[col..nn]) {
                *x -= f * p;
            }
            bx[row] -= f * bx[col];
            by[row] -= f * by[col];
        }
    }
    Ok((0..nn)
        .map(|i| (bx[i] / a[i][i], by[i] / a[i][i]))
        .collect())
}

/// Barycenter of each face: corner nodes, leg anchors, and for boundary
/// faces the midpoint of their arc.
fn face_positions(g: &PlabicGraph, nodes: &[Point]) -> Result<Vec<Point>> {
    let faces = g.faces()?;
    let mut out = Vec::with_capacity(faces.len());
    for f in &faces.faces {
        let mut pts: Vec<Point> = Vec::new();
        for s in &f.sides {
            match *s {
                Side::Edge { edge, .. } => {
                    pts.push(nodes[g.edges[edge].a]);
                    pts.push(nodes[g.edges[edge].b]);
                }
                Side::LegIn(k) | Side::LegOut(k) => {
                    pts.push(marked_point(k, g.n));
                    pts.push(nodes[g.legs[k - 1]]);
                }
                Side::Arc { k, .. } => {
                    pts.push(arc_midpoint(k, g.n));
                }
            }
        }
        let m = pts.len() as f64;
        let (sx, sy) = pts
            .iter()
            .fold((0.0, 0.0), |(ax, ay), (x, y)| (ax + x, ay + y));
        out.push((sx / m, sy / m));
    }
    Ok(out)
}

fn svg_open(out: &mut String) {
    let _ = writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{s}\" height=\"{s}\" viewBox=\"0 0 {s} {s}\">",
        s = SIZE
    );
    let _ = writeln!(
        out,
        "<defs>\
         <marker id=\"arr\" viewBox=\"0 0 10 10\" refX=\"9\" refY=\"5\" \
         markerWidth=\"7\" markerHeight=\"7\" orient=\"auto-start-reverse\">\
         <path d=\"M 0 0 L 10 5 L 0 10 z\" fill=\"#333\"/></marker>\
         <marker id=\"arrf\" viewBox=\"0 0 10 10\" refX=\"9\" refY=\"5\" \
         markerWidth=\"6\" markerHeight=\"6\" orient=\"auto-start-reverse\">\
         <path d=\"M 0 0 L 10 5 L 0 10 z\" fill=\"#000\"/></marker>\
         </defs>"
    );
    let _ = writeln!(
        out,
        "<circle cx=\"{c}\" cy=\"{c}\" r=\"{r}\" fill=\"none\" stroke=\"#bbb\" stroke-width=\"1\"/>",
        c = CENTER,
        r = RADIUS
    );
}

fn svg_marked_points(g: &PlabicGraph, out: &mut String) {
    for k in 1..=g.n {
        let (x, y) = marked_point(k, g.n);
        let _ = writeln!(
            out,
            "<circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"3\" fill=\"#888\"/>",
            x, y
        );
        // Nudge the numeral outward from the disc center.
        let lx = CENTER + (x - CENTER) * 1.07;
        let ly = CENTER + (y - CENTER) * 1.07;
        let _ = writeln!(
            out,
            "<text x=\"{:.2}\" y=\"{:.2}\" font-size=\"13\" fill=\"#555\" \
             text-anchor=\"middle\" dominant-baseline=\"middle\">{}</text>",
            lx, ly, k
        );
    }
}

/// Quadratic path from `a` to `b`, bowed sideways by `offset` pixels and
/// trimmed by `trim` pixels at both ends.
fn curve(a: Point, b: Point, offset: f64, trim: f64) -> String {
    let (dx, dy) = (b.0 - a.0, b.1 - a.1);
    let len = (dx * dx + dy * dy).sqrt().max(1e-6);
    let (ux, uy) = (dx / len, dy / len);
    let (nx, ny) = (-uy, ux);
    let a = (a.0 + ux * trim, a.1 + uy * trim);
    let b = (b.0 - ux * trim, b.1 - uy * trim);
    let mid = (
        (a.0 + b.0) / 2.0 + nx * offset,
        (a.1 + b.1) / 2.0 + ny * offset,
    );
    format!(
        "M {:.2} {:.2} Q {:.2} {:.2} {:.2} {:.2}",
        a.0, a.1, mid.0, mid.1, b.0, b.1
    )
}

/// Offsets spreading `count` parallel strokes around a straight line.
fn spread(count: usize, step: f64) -> Vec<f64> {
    (0..count)
        .map(|i| (i as f64 - (count as f64 - 1.0) / 2.0) * step)
        .collect()
}

/// The plabic graph itself: bipartite nodes, edges, and boundary legs.
pub fn graph_svg(g: &PlabicGraph) -> Result<String> {
    let nodes = node_positions(g)?;
    let mut out = String::new();
    svg_open(&mut out);
    svg_marked_points(g, &mut out);
    for (k0, &v) in g.legs.iter().enumerate() {
        let (mx, my) = marked_point(k0 + 1, g.n);
        let (nx, ny) = nodes[v];
        let _ = writeln!(
            out,
            "<line x1=\"{:.2}\" y1=\"{:.2}\" x2=\"{:.2}\" y2=\"{:.2}\" \
             stroke=\"#333\" stroke-width=\"1.6\"/>",
            mx, my, nx, ny
        );
    }
    // Group edges by unordered endpoint pair so multi-edges fan out.
    let mut groups: std::collections::BTreeMap<(usize, usize), Vec<usize>> = Default::default();
    for (i, e) in g.edges.iter().enumerate() {
        groups
            .entry((e.a.min(e.b), e.a.max(e.b)))
            .or_default()
            .push(i);
    }
    for ((a, b), members) in &groups {
        let offsets = spread(members.len(), 18.0);
        for (j, _) in members.iter().enumerate() {
            let _ = writeln!(
                out,
                "<path d=\"{}\" fill=\"none\" stroke=\"#333\" stroke-width=\"1.6\"/>",
                curve(nodes[*a], nodes[*b], offsets[j], 0.0)
            );
        }
    }
    for (i, node) in g.nodes.iter().enumerate() {
        let (x, y) = nodes[i];
        let fill = match node.color {
            Color::Black => "#111",
            Color::White => "#fff",
        };
        let _ = writeln!(
            out,
            "<circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"8\" fill=\"{}\" \
             stroke=\"#111\" stroke-width=\"1.6\"/>",
            x, y, fill
        );
        let _ = writeln!(
            out,
            "<text x=\"{:.2}\" y=\"{:.2}\" font-size=\"12\" fill=\"#444\" \
             text-anchor=\"middle\" dominant-baseline=\"middle\">{}</text>",
            x + 14.0,
            y - 10.0,
            node.name
        );
    }
    out.push_str("</svg>\n");
    Ok(out)
}

/// The ice quiver drawn over the diagram: one vertex per face (diamonds
/// when frozen), arrows between face barycenters (bold when frozen).
pub fn quiver_svg(g: &PlabicGraph, qp: &IceQP) -> Result<String> {
    let nodes = node_positions(g)?;
    let faces = face_positions(g, &nodes)?;
    if faces.len() != qp.quiver.vertices.len() {
        return Err(Error::Internal(
            "quiver does not match the diagram's face count".into(),
        ));
    }
    let mut out = String::new();
    svg_open(&mut out);
    svg_marked_points(g, &mut out);
    // Arrows first so the vertex glyphs cover the line ends.
    let mut groups: std::collections::BTreeMap<(usize, usize), Vec<usize>> = Default::default();
    for (i, a) in qp.quiver.arrows.iter().enumerate() {
        groups
            .entry((a.tail.min(a.head), a.tail.max(a.head)))
            .or_default()
            .push(i);
    }
    for members in groups.values() {
        let offsets = spread(members.len(), 22.0);
        for (j, &i) in members.iter().enumerate() {
            let a = &qp.quiver.arrows[i];
            // The offset is defined on the unordered pair; flip it for
            // arrows running against the group's orientation so parallel
            // and antiparallel arrows fan out consistently.
            let sign = if a.tail <= a.head { 1.0 } else { -1.0 };
            let (stroke, width, marker) = if a.frozen {
                ("#000", 3.0, "arrf")
            } else {
                ("#333", 1.5, "arr")
            };
            let _ = writeln!(
                out,
                "<path d=\"{}\" fill=\"none\" stroke=\"{}\" stroke-width=\"{}\" \
                 marker-end=\"url(#{})\"/>",
                curve(faces[a.tail], faces[a.head], sign * offsets[j], 18.0),
                stroke,
                width,
                marker
            );
        }
    }
    for (i, v) in qp.quiver.vertices.iter().enumerate() {
        let (x, y) = faces[i];
        if v.frozen {
            let r = 16.0;
            let _ = writeln!(
                out,
                "<polygon points=\"{:.2},{:.2} {:.2},{:.2} {:.2},{:.2} {:.2},{:.2}\" \
                 fill=\"#fff\" stroke=\"#000\" stroke-width=\"2\"/>",
                x,
                y - r,
                x + r,
                y,
                x,
                y + r,
                x - r,
                y
            );
        } else {
            let _ = writeln!(
                out,
                "<circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"14\" fill=\"#fff\" \
                 stroke=\"#333\" stroke-width=\"1.5\"/>",
                x, y
            );
        }
        let _ = writeln!(
            out,
            "<text x=\"{:.2}\" y=\"{:.2}\" font-size=\"12\" fill=\"#111\" \
             text-anchor=\"middle\" dominant-baseline=\"middle\">{}</text>",
            x, y, v.id
        );
    }
    out.push_str("</svg>\n");
    Ok(out)
}
