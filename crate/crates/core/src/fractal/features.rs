//! Fractal-significance best basis and per-image feature vectors.

use rayon::prelude::*;

use super::wavelet::{wpt_decompose, NodeId, WaveletPacketTree};
use super::{fractal_dimension, fractal_image, lacunarity, FRACTAL_BOX, MIN_PATCH, SENTINEL_FD};
use crate::classifier::ClassLabel;
use crate::error::{Error, Result};
use crate::models::ModelKind;
use crate::parametric::ParametricImageSet;

/// Fractal dimension of every subband, `scores[level][index]`; `None` where
/// the subband is too small to estimate.
pub type NodeScores = Vec<Vec<Option<f64>>>;

/// Terminal subbands, ordered by their position in the frequency plane.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BasisSelection {
    pub depth: usize,
    pub nodes: Vec<NodeId>,
}

impl BasisSelection {
    /// All `4^depth` subbands of the finest level.
    pub fn full_level(depth: usize) -> Self {
        BasisSelection {
            depth,
            nodes: (0..4usize.pow(depth as u32))
                .map(|index| NodeId { level: depth, index })
                .collect(),
        }
    }

    pub fn root(depth: usize) -> Self {
        BasisSelection {
            depth,
            nodes: vec![NodeId::ROOT],
        }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// True when the nodes cover the plane exactly once.
    pub fn is_tiling(&self) -> bool {
        let total = 4usize.pow(self.depth as u32);
        let mut covered = vec![false; total];
        for n in &self.nodes {
            if n.level > self.depth || n.index >= 4usize.pow(n.level as u32) {
                return false;
            }
            let (start, width) = n.span(self.depth);
            for c in &mut covered[start..start + width] {
                if *c {
                    return false;
                }
                *c = true;
            }
        }
        covered.iter().all(|&c| c)
    }

    fn sort(&mut self) {
        let depth = self.depth;
        self.nodes.sort_by_key(|n| n.span(depth).0);
    }
}

/// How the subbands entering the feature vector are chosen.
#[derive(Debug, Clone, PartialEq)]
pub enum BasisPolicy {
    FullLevel,
    /// Best basis of this image's maps, scored on their mean node dimensions.
    Adaptive,
    Fixed(BasisSelection),
}

/// Fractal dimension of every node; constant subbands score [`SENTINEL_FD`].
pub fn node_fractal_dimensions(tree: &WaveletPacketTree) -> NodeScores {
    tree.nodes
        .iter()
        .map(|level| {
            level
                .iter()
                .map(|band| {
                    let (r, c) = band.dim();
                    (r >= MIN_PATCH && c >= MIN_PATCH)
                        .then(|| fractal_dimension(band.view()).map_or(SENTINEL_FD, |e| e.fd))
                })
                .collect()
        })
        .collect()
}

/// Best basis of one tree.
pub fn select_basis(tree: &WaveletPacketTree) -> BasisSelection {
    select_basis_from_scores(tree.depth, &node_fractal_dimensions(tree))
}

/// Bottom-up selection: a node is split when the most significant
/// dimension found below it exceeds its own; ties keep the node.
pub fn select_basis_from_scores(depth: usize, scores: &NodeScores) -> BasisSelection {
    fn best(id: NodeId, depth: usize, scores: &NodeScores) -> (Vec<NodeId>, f64) {
        let own = scores[id.level][id.index].unwrap_or(SENTINEL_FD);
        if id.level == depth {
            return (vec![id], own);
        }
        let children = id.children();
        if children.iter().any(|c| scores[c.level][c.index].is_none()) {
            return (vec![id], own);
        }
        let mut nodes = Vec::new();
        let mut significance = f64::NEG_INFINITY;
        for c in children {
            let (n, s) = best(c, depth, scores);
            nodes.extend(n);
            significance = significance.max(s);
        }
        if significance > own {
            (nodes, significance)
        } else {
            (vec![id], own)
        }
    }
    let mut sel = BasisSelection {
        depth,
        nodes: best(NodeId::ROOT, depth, scores).0,
    };
    sel.sort();
    sel
}

/// Fractal signature of one image: `(fd, lacunarity)` for every parameter
/// map and selected subband, parameter-major.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureVector {
    pub values: Vec<f64>,
    pub image_id: String,
    pub group_id: String,
    pub class_label: Option<ClassLabel>,
    /// Subbands that contributed sentinel values.
    pub degenerate: usize,
}

impl FeatureVector {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Column names `kind:parameter:node:fd|lac` in feature order.
pub fn feature_names(kind: ModelKind, basis: &BasisSelection) -> Vec<String> {
    let mut names = Vec::new();
    for p in kind.param_names() {
        for n in &basis.nodes {
            for stat in ["fd", "lac"] {
                names.push(format!("{}:{p}:{}:{stat}", kind.name(), n.label()));
            }
        }
    }
    names
}

pub fn extract_features(maps: &ParametricImageSet, depth: usize, policy: &BasisPolicy) -> Result<FeatureVector> {
    let trees: Vec<WaveletPacketTree> = maps
        .maps
        .par_iter()
        .map(|m| wpt_decompose(m.values.view(), depth))
        .collect::<Result<_>>()?;
    let basis = match policy {
        BasisPolicy::FullLevel => BasisSelection::full_level(depth),
        BasisPolicy::Fixed(b) => {
            if b.depth != depth || !b.is_tiling() {
                return Err(Error::argument(format!("fixed basis is not a tiling at depth {depth}")));
            }
            b.clone()
        }
        BasisPolicy::Adaptive => {
            let all: Vec<NodeScores> = trees.iter().map(node_fractal_dimensions).collect();
            select_basis_from_scores(depth, &mean_node_scores(&all))
        }
    };
    let per_band: Vec<((f64, f64), bool)> = trees
        .par_iter()
        .flat_map_iter(|t| basis.nodes.iter().map(move |&n| t.node(n)))
        .map(|band| band_signature(band.view()))
        .collect::<Result<_>>()?;
    Ok(FeatureVector {
        values: per_band.iter().flat_map(|((fd, lac), _)| [*fd, *lac]).collect(),
        image_id: maps.frame_id.clone(),
        group_id: maps.group_id.clone(),
        class_label: maps.class_label,
        degenerate: per_band.iter().filter(|(_, d)| *d).count(),
    })
}

/// Element-wise mean of several trees' node scores.
pub fn mean_node_scores(all: &[NodeScores]) -> NodeScores {
    let first = &all[0];
    first
        .iter()
        .enumerate()
        .map(|(l, level)| {
            (0..level.len())
                .map(|i| {
                    let vals: Option<Vec<f64>> = all.iter().map(|s| s[l][i]).collect();
                    vals.map(|v| v.iter().sum::<f64>() / v.len() as f64)
                })
                .collect()
        })
        .collect()
}

fn band_signature(band: ndarray::ArrayView2<f64>) -> Result<((f64, f64), bool)> {
    let (r, c) = band.dim();
    if r < FRACTAL_BOX || c < FRACTAL_BOX {
        return Err(Error::argument(format!(
            "subband {r}x{c} is smaller than the {FRACTAL_BOX}x{FRACTAL_BOX} fractal box"
        )));
    }
    match fractal_dimension(band) {
        Ok(e) => {
            let lac = lacunarity(fractal_image(band, FRACTAL_BOX)?.view())?.value();
            Ok(((e.fd, lac), false))
        }
        Err(Error::DegenerateData(_)) => Ok(((SENTINEL_FD, 0.0), true)),
        Err(e) => Err(e),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parametric::{ParametricMap, WindowSpec};
    use ndarray::Array2;
    use rand::{Rng, SeedableRng};

    fn set(kind: ModelKind, seed: u64, size: usize) -> ParametricImageSet {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let maps = kind
            .param_names()
            .iter()
            .map(|p| ParametricMap {
                values: Array2::from_shape_fn((size, size), |(i, j)| {
                    (i as f64 * 0.1).sin() + j as f64 * 0.01 + rng.random::<f64>()
                }),
                parameter_name: p.to_string(),
                kind,
                window: WindowSpec::default(),
                frame_id: "x".into(),
                fit_failures: 0,
            })
            .collect();
        ParametricImageSet {
            kind,
            maps,
            frame_id: "x".into(),
            group_id: "g".into(),
            class_label: Some(ClassLabel::Respondent),
        }
    }

    #[test]
    fn lengths_follow_kind_depth_and_basis() {
        for kind in ModelKind::ALL {
            let s = set(kind, 1, 64);
            let f = extract_features(&s, 1, &BasisPolicy::FullLevel).unwrap();
            assert_eq!(f.len(), kind.param_count() * 4 * 2);
            assert_eq!(f.len(), feature_names(kind, &BasisSelection::full_level(1)).len());
            assert!(f.values.iter().all(|v| v.is_finite()));
        }
        let f = extract_features(&set(ModelKind::Nig, 2, 64), 1, &BasisPolicy::FullLevel).unwrap();
        assert_eq!(f.len(), 32);
    }

    #[test]
    fn duplicate_inputs_give_identical_features() {
        let s = set(ModelKind::Nakagami, 3, 64);
        let a = extract_features(&s, 2, &BasisPolicy::Adaptive).unwrap();
        let b = extract_features(&s.clone(), 2, &BasisPolicy::Adaptive).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn constant_maps_give_sentinels_and_root_basis() {
        let mut s = set(ModelKind::Rayleigh, 4, 64);
        s.maps[0].values.fill(1.5);
        let t = wpt_decompose(s.maps[0].values.view(), 2).unwrap();
        assert_eq!(select_basis(&t).nodes, vec![NodeId::ROOT]);
        let f = extract_features(&s, 1, &BasisPolicy::FullLevel).unwrap();
        assert_eq!(f.degenerate, 4);
        assert_eq!(&f.values[..2], &[SENTINEL_FD, 0.0]);
    }

    #[test]
    fn tiling_checks() {
        assert!(BasisSelection::full_level(2).is_tiling());
        assert!(BasisSelection::root(2).is_tiling());
        let mut mixed = BasisSelection {
            depth: 2,
            nodes: vec![
                NodeId { level: 1, index: 0 },
                NodeId { level: 1, index: 1 },
                NodeId { level: 1, index: 3 },
            ],
        };
        assert!(!mixed.is_tiling());
        mixed.nodes.extend((8..12).map(|index| NodeId { level: 2, index }));
        assert!(mixed.is_tiling());
        mixed.nodes.push(NodeId::ROOT);
        assert!(!mixed.is_tiling());
    }

    #[test]
    fn split_rule_on_scores() {
        // root 2.4; child 2 has a grandchild at 2.9 -> everything splits to where it pays
        let mut scores: NodeScores = vec![vec![Some(2.4)], vec![Some(2.3); 4], vec![Some(2.2); 16]];
        scores[2][9] = Some(2.9);
        let sel = select_basis_from_scores(2, &scores);
        assert!(sel.is_tiling());
        assert!(sel.nodes.contains(&NodeId { level: 2, index: 9 }));
        assert!(sel.nodes.contains(&NodeId { level: 1, index: 0 }));
        // ties stay at the parent
        let flat: NodeScores = vec![vec![Some(2.5)], vec![Some(2.5); 4], vec![Some(2.5); 16]];
        assert_eq!(select_basis_from_scores(2, &flat).nodes, vec![NodeId::ROOT]);
    }
}
