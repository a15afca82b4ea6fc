//! Figure-data emission: sampled decomposition paths with their latent
//! split markers, a build/direct overlay, and a lattice transform.

use vervaat::decomp::{build_vb, build_vervaat_bridge_neg, build_vervaat_bridge_pos, direct_vervaat_bridge};
use vervaat::grid::GridPath;
use vervaat::lattice::{vervaat_walk, Walk};
use vervaat::rng::RngStream;
use vervaat::{Error, Result};

use crate::config::ExperimentConfig;
use crate::table::{num, Table};

pub const FIGURES: &[&str] = &["vbridge-neg", "vbridge-pos", "vb", "overlay", "lattice"];

fn path_with_marker(p: &GridPath, marker_name: &str, marker_idx: usize) -> Table {
    let mut t = Table::new(["t", "value", marker_name]);
    for (i, &v) in p.values().iter().enumerate() {
        let flag = if i == marker_idx { "1" } else { "0" };
        t.push([num(p.time_at(i)), num(v), flag.to_string()]);
    }
    t
}

// Uniform lattice bridge of length n to a, by shuffling a fixed
// multiset of steps.
fn lattice_bridge(n: usize, a: i64, rng: &mut RngStream) -> Result<Walk> {
    let ups = ((n as i64 + a) / 2) as usize;
    let mut steps: Vec<i8> = vec![1; ups];
    steps.resize(n, -1);
    for i in (1..n).rev() {
        let j = (rng.uniform() * (i + 1) as f64) as usize;
        steps.swap(i, j.min(i));
    }
    Walk::from_increments(steps)
}

pub fn figure_table(figure: &str, cfg: &ExperimentConfig) -> Result<Table> {
    let mut rng = RngStream::new(cfg.seed, 0);
    let n = cfg.grid;
    match figure {
        "vbridge-neg" => {
            let lambda = if cfg.lambda < 0.0 { cfg.lambda } else { -1.0 };
            let s = build_vervaat_bridge_neg(lambda, n, &mut rng)?;
            let z = s.latent("z").expect("neg build records z");
            Ok(path_with_marker(&s.path, "z", s.path.index_at(z)))
        }
        "vbridge-pos" => {
            let lambda = if cfg.lambda > 0.0 { cfg.lambda } else { 1.0 };
            let s = build_vervaat_bridge_pos(lambda, n, &mut rng)?;
            let zhat = s.latent("zhat").expect("pos build records zhat");
            Ok(path_with_marker(&s.path, "zhat", s.path.index_at(zhat)))
        }
        "vb" => {
            let s = build_vb(n, &mut rng)?;
            let a = s.latent("a").expect("build records the split");
            Ok(path_with_marker(&s.path, "a", s.path.index_at(a)))
        }
        "overlay" => {
            let lambda = if cfg.lambda < 0.0 { cfg.lambda } else { -1.0 };
            let built = build_vervaat_bridge_neg(lambda, n, &mut rng)?;
            let direct = direct_vervaat_bridge(lambda, n, &mut rng)?;
            let mut t = Table::new(["t", "built", "direct"]);
            for i in 0..=n {
                t.push([
                    num(built.path.time_at(i)),
                    num(built.path.values()[i]),
                    num(direct.path.values()[i]),
                ]);
            }
            Ok(t)
        }
        "lattice" => {
            let (n, a) = (50usize, -2i64);
            let w = lattice_bridge(n, a, &mut rng)?;
            let (v, _) = vervaat_walk(&w);
            let hit = v.first_hit(-1).expect("transform reaches -1");
            let mut t = Table::new(["step", "value", "first_visit"]);
            for (i, &p) in v.positions().iter().enumerate() {
                let flag = if i == hit { "1" } else { "0" };
                t.push([i.to_string(), p.to_string(), flag.to_string()]);
            }
            Ok(t)
        }
        other => Err(Error::invalid(format!(
            "unknown figure {other:?}; available: {}",
            FIGURES.join(", ")
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lattice_bridge_hits_endpoint() {
        let mut rng = RngStream::new(1, 0);
        for _ in 0..50 {
            let w = lattice_bridge(50, -2, &mut rng).unwrap();
            assert_eq!(w.end(), -2);
        }
    }

    #[test]
    fn all_figures_render() {
        let cfg = ExperimentConfig {
            grid: 64,
            ..Default::default()
        };
        for f in FIGURES {
            let t = figure_table(f, &cfg).unwrap();
            assert!(t.rows() > 10, "{f}");
        }
    }

    #[test]
    fn figures_deterministic() {
        let cfg = ExperimentConfig {
            grid: 64,
            ..Default::default()
        };
        let a = figure_table("vb", &cfg).unwrap().render();
        let b = figure_table("vb", &cfg).unwrap().render();
        assert_eq!(a, b);
    }
}
