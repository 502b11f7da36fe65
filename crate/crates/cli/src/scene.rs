//! Exact cell decomposition of the degree-g Picard torus for genus-2 graphs,
//! and its SVG rendering. All geometry is rational; decimals appear only in
//! the rendered output.

use breakdiv_core::divisor::Divisor;
use breakdiv_core::error::{Error, Result};
use breakdiv_core::graph::{spanning_trees, SpanningTree, WeightedGraph};
use breakdiv_core::homology::{abel_jacobi_divisor, cell_volumes, project_chain};
use breakdiv_core::metric::{canonical_break_divisor_metric, MetricDivisor, MetricPoint};
use breakdiv_core::rational::Rational;
use serde::Serialize;
use std::collections::BTreeMap;

type Point = (Rational, Rational);
type Polygon = Vec<Point>;

/// One torus cell: the parallelotope of a spanning tree, clipped into the
/// unit square, with its break-divisor label.
#[derive(Debug, Clone, Serialize)]
pub struct SceneCell {
    pub tree: SpanningTree,
    pub label: String,
    pub center: (Rational, Rational),
    /// Clipped pieces inside [0,1]^2; a cell crossing the seam has several.
    pub pieces: Vec<Polygon>,
    /// Exact area, summed over the pieces; equals w(T)/det(M).
    pub area: Rational,
}

/// Cell decomposition of the torus in the fundamental-cycle basis of the
/// first spanning tree. Cell areas sum to one exactly.
#[derive(Debug, Clone, Serialize)]
pub struct SvgScene {
    pub base_point: String,
    pub base_tree: SpanningTree,
    pub cells: Vec<SceneCell>,
}

impl SvgScene {
    pub fn area_sum(&self) -> Rational {
        self.cells.iter().map(|c| c.area.clone()).sum()
    }
}

fn shoelace_area(poly: &[Point]) -> Rational {
    let n = poly.len();
    if n < 3 {
        return Rational::zero();
    }
    let mut twice = Rational::zero();
    for i in 0..n {
        let (x1, y1) = &poly[i];
        let (x2, y2) = &poly[(i + 1) % n];
        twice += x1 * y2 - x2 * y1;
    }
    twice.abs() / Rational::from_int(2)
}

/// Clips a polygon against a half-plane keep(p) >= 0 where the boundary is
/// found by linear interpolation (Sutherland-Hodgman step).
fn clip_half_plane(
    poly: &[Point],
    inside: impl Fn(&Point) -> bool,
    eval: impl Fn(&Point) -> Rational,
) -> Polygon {
    let mut out = Vec::new();
    let n = poly.len();
    for i in 0..n {
        let current = &poly[i];
        let next = &poly[(i + 1) % n];
        let cin = inside(current);
        let nin = inside(next);
        if cin {
            out.push(current.clone());
        }
        if cin != nin {
            let c = eval(current);
            let d = eval(next);
            // c and d have opposite signs, so the denominator is nonzero
            let t = &c / &(&c - &d);
            let x = &current.0 + &(&t * &(&next.0 - &current.0));
            let y = &current.1 + &(&t * &(&next.1 - &current.1));
            out.push((x, y));
        }
    }
    out
}

fn clip_to_unit_square(poly: &Polygon) -> Polygon {
    let zero = Rational::zero();
    let one = Rational::one();
    let mut p = poly.clone();
    p = clip_half_plane(&p, |q| q.0 >= zero, |q| q.0.clone());
    p = clip_half_plane(&p, |q| q.0 <= one, |q| &Rational::one() - &q.0);
    p = clip_half_plane(&p, |q| q.1 >= zero, |q| q.1.clone());
    p = clip_half_plane(&p, |q| q.1 <= one, |q| &Rational::one() - &q.1);
    p
}

fn translate(poly: &Polygon, dx: &Rational, dy: &Rational) -> Polygon {
    poly.iter()
        .map(|(x, y)| (x + dx, y + dy))
        .collect()
}

/// Splits a parallelogram into its translates clipped to the unit square.
fn unfold(poly: &Polygon) -> Vec<Polygon> {
    let xs: Vec<&Rational> = poly.iter().map(|(x, _)| x).collect();
    let ys: Vec<&Rational> = poly.iter().map(|(_, y)| y).collect();
    let min_x = xs.iter().min().unwrap().floor_int();
    let max_x = xs.iter().max().unwrap().floor_int();
    let min_y = ys.iter().min().unwrap().floor_int();
    let max_y = ys.iter().max().unwrap().floor_int();

    let mut pieces = Vec::new();
    let mut ix = min_x.clone();
    while ix <= max_x {
        let mut iy = min_y.clone();
        while iy <= max_y {
            let dx = -Rational::from_bigints(ix.clone(), 1.into());
            let dy = -Rational::from_bigints(iy.clone(), 1.into());
            let clipped = dedupe(clip_to_unit_square(&translate(poly, &dx, &dy)));
            if !shoelace_area(&clipped).is_zero() {
                pieces.push(clipped);
            }
            iy += 1;
        }
        ix += 1;
    }
    pieces
}

/// Drops consecutive duplicate vertices left behind by clipping.
fn dedupe(poly: Polygon) -> Polygon {
    let mut out: Polygon = Vec::with_capacity(poly.len());
    for p in poly {
        if out.last() != Some(&p) {
            out.push(p);
        }
    }
    while out.len() > 1 && out.first() == out.last() {
        out.pop();
    }
    out
}

/// Builds the cell decomposition. The graph must have genus exactly two.
pub fn build_scene(g: &WeightedGraph) -> Result<SvgScene> {
    if g.genus() != 2 {
        return Err(Error::WrongGenus {
            expected: 2,
            got: g.genus(),
        });
    }
    let trees = spanning_trees(g);
    let t0 = trees[0].clone();
    let q0 = g.vertex_id(0).clone();
    let volumes = cell_volumes(g)?;

    let mut cells = Vec::new();
    for (tree, volume) in trees.iter().zip(&volumes.cells) {
        let cotree = tree.cotree_edges(g);
        assert_eq!(cotree.len(), 2);

        // corner of the cell: both break points at their edge tails
        let corner_divisor = Divisor::from_entries(cotree.iter().map(|e| {
            let edge = g.edge(e).expect("cotree edge");
            (g.vertex_id(edge.tail).clone(), 1)
        }));
        let corner = abel_jacobi_divisor(g, &corner_divisor, &q0, &t0)?.coords;

        // sweeping a break point along its edge translates the image by the
        // projected edge vector
        let generators: Vec<Vec<Rational>> = cotree
            .iter()
            .map(|e| {
                project_chain(
                    g,
                    &t0,
                    &BTreeMap::from([(e.clone(), Rational::one())]),
                )
            })
            .collect::<Result<_>>()?;
        let (g1, g2) = (&generators[0], &generators[1]);
        let v0 = (corner[0].clone(), corner[1].clone());
        let v1 = (&v0.0 + &g1[0], &v0.1 + &g1[1]);
        let v2 = (&v1.0 + &g2[0], &v1.1 + &g2[1]);
        let v3 = (&v0.0 + &g2[0], &v0.1 + &g2[1]);
        let parallelogram = vec![v0.clone(), v1, v2, v3];

        let pieces = unfold(&parallelogram);
        let area: Rational = pieces.iter().map(|p| shoelace_area(p)).sum();
        assert_eq!(
            area, volume.vol_ratio,
            "clipped area disagrees with the exact cell volume"
        );

        // the center class is the midpoint break divisor; canonicalizing it
        // is the identity and doubles as a sanity check
        let midpoints = MetricDivisor::from_points(cotree.iter().map(|e| {
            let edge = g.edge(e).expect("cotree edge");
            (
                MetricPoint::interior(e, &edge.length / &Rational::from_int(2)),
                1,
            )
        }));
        let label_divisor = canonical_break_divisor_metric(g, &midpoints, None)?;
        let center = (
            (&v0.0 + &(&(&g1[0] + &g2[0]) / &Rational::from_int(2))).rem_unit(),
            (&v0.1 + &(&(&g1[1] + &g2[1]) / &Rational::from_int(2))).rem_unit(),
        );

        cells.push(SceneCell {
            tree: tree.clone(),
            label: label_divisor.to_string(),
            center,
            pieces,
            area,
        });
    }
    Ok(SvgScene {
        base_point: q0,
        base_tree: t0,
        cells,
    })
}

const PALETTE: [&str; 8] = [
    "#8dd3c7", "#ffffb3", "#bebada", "#fb8072", "#80b1d3", "#fdb462", "#b3de69", "#fccde5",
];

fn coord(r: &Rational) -> String {
    r.to_decimal(9)
}

/// Renders the scene as a standalone SVG. The torus is drawn as the unit
/// square with y pointing up; coordinates carry nine decimals.
pub fn render_svg(scene: &SvgScene) -> String {
    let mut out = String::new();
    out.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    out.push_str(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"-0.08 -0.08 1.16 1.16\" width=\"640\" height=\"640\">\n",
    );
    let flip = |y: &Rational| -> Rational { &Rational::one() - y };
    for (i, cell) in scene.cells.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        for piece in &cell.pieces {
            let points: Vec<String> = piece
                .iter()
                .map(|(x, y)| format!("{},{}", coord(x), coord(&flip(y))))
                .collect();
            out.push_str(&format!(
                "  <polygon points=\"{}\" fill=\"{}\" fill-opacity=\"0.75\" stroke=\"#333333\" stroke-width=\"0.004\"/>\n",
                points.join(" "),
                color
            ));
        }
    }
    for cell in &scene.cells {
        // put the label on the largest piece so it stays inside the square
        let biggest = cell
            .pieces
            .iter()
            .max_by(|a, b| shoelace_area(a).cmp(&shoelace_area(b)));
        if let Some(piece) = biggest {
            let n = Rational::from_int(piece.len() as i64);
            let cx: Rational = piece.iter().map(|(x, _)| x.clone()).sum::<Rational>() / n.clone();
            let cy: Rational = piece.iter().map(|(_, y)| y.clone()).sum::<Rational>() / n;
            out.push_str(&format!(
                "  <text x=\"{}\" y=\"{}\" font-size=\"0.035\" text-anchor=\"middle\" font-family=\"monospace\">{}</text>\n",
                coord(&cx),
                coord(&flip(&cy)),
                svg_escape(&cell.label)
            ));
        }
    }
    out.push_str(
        "  <rect x=\"0\" y=\"0\" width=\"1\" height=\"1\" fill=\"none\" stroke=\"#000000\" stroke-width=\"0.006\"/>\n",
    );
    out.push_str("</svg>\n");
    out
}

fn svg_escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Builds the scene and its rendering in one call.
pub fn emit_svg(g: &WeightedGraph) -> Result<(SvgScene, String)> {
    let scene = build_scene(g)?;
    let svg = render_svg(&scene);
    Ok((scene, svg))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rat(s: &str) -> Rational {
        s.parse().unwrap()
    }

    fn theta() -> WeightedGraph {
        WeightedGraph::from_parts(
            &["u", "v"],
            &[
                ("a", "u", "v", rat("2")),
                ("b", "u", "v", rat("1")),
                ("c", "u", "v", rat("2")),
            ],
        )
        .unwrap()
    }

    #[test]
    fn clipping_preserves_area() {
        // unit square shifted by (1/2, 1/3): pieces must tile back to area 1
        let square = vec![
            (rat("1/2"), rat("1/3")),
            (rat("3/2"), rat("1/3")),
            (rat("3/2"), rat("4/3")),
            (rat("1/2"), rat("4/3")),
        ];
        let pieces = unfold(&square);
        assert_eq!(pieces.len(), 4);
        let total: Rational = pieces.iter().map(|p| shoelace_area(p)).sum();
        assert_eq!(total, rat("1"));
    }

    #[test]
    fn shoelace_matches_known_triangle() {
        let tri = vec![
            (rat("0"), rat("0")),
            (rat("1"), rat("0")),
            (rat("0"), rat("1")),
        ];
        assert_eq!(shoelace_area(&tri), rat("1/2"));
    }

    #[test]
    fn theta_scene_tiles_the_torus() {
        let scene = build_scene(&theta()).unwrap();
        assert_eq!(scene.cells.len(), 3);
        let mut areas: Vec<Rational> = scene.cells.iter().map(|c| c.area.clone()).collect();
        areas.sort();
        assert_eq!(areas, vec![rat("1/4"), rat("1/4"), rat("1/2")]);
        assert_eq!(scene.area_sum(), rat("1"));
    }

    #[test]
    fn genus_one_is_rejected() {
        let tri = WeightedGraph::from_parts(
            &["v1", "v2", "v3"],
            &[
                ("e12", "v1", "v2", rat("1")),
                ("e13", "v1", "v3", rat("1")),
                ("e23", "v2", "v3", rat("1")),
            ],
        )
        .unwrap();
        assert_eq!(
            build_scene(&tri).unwrap_err(),
            Error::WrongGenus { expected: 2, got: 1 }
        );
    }

    #[test]
    fn svg_text_has_one_polygon_group_per_cell() {
        let (scene, svg) = emit_svg(&theta()).unwrap();
        let polygons = svg.matches("<polygon").count();
        let total_pieces: usize = scene.cells.iter().map(|c| c.pieces.len()).sum();
        assert_eq!(polygons, total_pieces);
        assert!(total_pieces >= scene.cells.len());
        assert!(svg.contains("<text"));
    }
}
