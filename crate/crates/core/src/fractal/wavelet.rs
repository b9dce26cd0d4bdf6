//! Periodic 2D wavelet-packet transform with the 8-tap Daubechies filter.

use ndarray::{s, Array2, ArrayView2, Axis};

use crate::error::{Error, Result};

/// Orthonormal 8-tap Daubechies (four vanishing moments) lowpass filter.
pub const DB4: [f64; 8] = [
    0.230_377_813_308_896_5,
    0.714_846_570_552_915_6,
    0.630_880_767_929_858_9,
    -0.027_983_769_416_859_854,
    -0.187_034_811_719_093_08,
    0.030_841_381_835_560_764,
    0.032_883_011_666_885_2,
    -0.010_597_401_785_069_032,
];

fn highpass() -> [f64; 8] {
    let l = DB4.len();
    std::array::from_fn(|k| if k % 2 == 0 { DB4[l - 1 - k] } else { -DB4[l - 1 - k] })
}

/// Address of a subband: children of `(level, index)` are
/// `(level + 1, 4 * index + c)` for `c` in LL, LH, HL, HH order, where the
/// first letter is the axial (row-direction) filter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NodeId {
    pub level: usize,
    pub index: usize,
}

impl NodeId {
    pub const ROOT: NodeId = NodeId { level: 0, index: 0 };

    pub fn children(self) -> [NodeId; 4] {
        std::array::from_fn(|c| NodeId {
            level: self.level + 1,
            index: 4 * self.index + c,
        })
    }

    /// Interval `[start, start + width)` this node covers among the `4^depth`
    /// finest subbands.
    pub fn span(self, depth: usize) -> (usize, usize) {
        let width = 4usize.pow((depth - self.level) as u32);
        (self.index * width, width)
    }

    pub fn label(self) -> String {
        format!("L{}.{}", self.level, self.index)
    }
}

/// Every subband of a full wavelet-packet tree.
#[derive(Debug, Clone, PartialEq)]
pub struct WaveletPacketTree {
    pub depth: usize,
    /// `nodes[level][index]`; level 0 is the (cropped) input.
    pub nodes: Vec<Vec<Array2<f64>>>,
}

impl WaveletPacketTree {
    pub fn node(&self, id: NodeId) -> &Array2<f64> {
        &self.nodes[id.level][id.index]
    }

    pub fn levels(&self) -> usize {
        self.depth
    }
}

/// Decomposes `map` to `depth` levels with periodic extension.
///
/// The map is cropped at the bottom/right to a multiple of `2^depth`.
pub fn wpt_decompose(map: ArrayView2<f64>, depth: usize) -> Result<WaveletPacketTree> {
    if depth == 0 {
        return Err(Error::argument("decomposition depth must be at least 1"));
    }
    let (rows, cols) = map.dim();
    let block = 1usize << depth;
    let need = block * DB4.len();
    if rows < need || cols < need {
        return Err(Error::argument(format!(
            "map {rows}x{cols} is too small for depth {depth} (needs {need}x{need})"
        )));
    }
    let root = map.slice(s![..rows / block * block, ..cols / block * block]).to_owned();
    let mut nodes = vec![vec![root]];
    for level in 0..depth {
        let next = nodes[level].iter().flat_map(split).collect();
        nodes.push(next);
    }
    Ok(WaveletPacketTree { depth, nodes })
}

/// Rebuilds the (cropped) input from the finest level of `tree`.
pub fn reconstruct(tree: &WaveletPacketTree) -> Array2<f64> {
    let mut level: Vec<Array2<f64>> = tree.nodes[tree.depth].clone();
    while level.len() > 1 {
        level = level
            .chunks_exact(4)
            .map(|q| merge([q[0].view(), q[1].view(), q[2].view(), q[3].view()]))
            .collect();
    }
    level.pop().expect("tree has a root")
}

fn split(x: &Array2<f64>) -> [Array2<f64>; 4] {
    let g = highpass();
    let (lo, hi) = analyze_axis(x.view(), Axis(0), &DB4, &g);
    let (ll, lh) = analyze_axis(lo.view(), Axis(1), &DB4, &g);
    let (hl, hh) = analyze_axis(hi.view(), Axis(1), &DB4, &g);
    [ll, lh, hl, hh]
}

fn merge(q: [ArrayView2<f64>; 4]) -> Array2<f64> {
    let g = highpass();
    let lo = synthesize_axis(q[0], q[1], Axis(1), &DB4, &g);
    let hi = synthesize_axis(q[2], q[3], Axis(1), &DB4, &g);
    synthesize_axis(lo.view(), hi.view(), Axis(0), &DB4, &g)
}

fn analyze_axis(x: ArrayView2<f64>, axis: Axis, h: &[f64], g: &[f64]) -> (Array2<f64>, Array2<f64>) {
    let mut shape = [x.nrows(), x.ncols()];
    let n = shape[axis.index()];
    shape[axis.index()] = n / 2;
    let mut lo = Array2::zeros(shape);
    let mut hi = Array2::zeros(shape);
    for ((src, mut l), mut hh) in x
        .lanes(axis)
        .into_iter()
        .zip(lo.lanes_mut(axis))
        .zip(hi.lanes_mut(axis))
    {
        for k in 0..n / 2 {
            let (mut a, mut b) = (0.0, 0.0);
            for (t, (&hv, &gv)) in h.iter().zip(g).enumerate() {
                let v = src[(2 * k + t) % n];
                a += hv * v;
                b += gv * v;
            }
            l[k] = a;
            hh[k] = b;
        }
    }
    (lo, hi)
}

fn synthesize_axis(lo: ArrayView2<f64>, hi: ArrayView2<f64>, axis: Axis, h: &[f64], g: &[f64]) -> Array2<f64> {
    let mut shape = [lo.nrows(), lo.ncols()];
    let half = shape[axis.index()];
    let n = 2 * half;
    shape[axis.index()] = n;
    let mut out = Array2::zeros(shape);
    for ((l, hh), mut dst) in lo.lanes(axis).into_iter().zip(hi.lanes(axis)).zip(out.lanes_mut(axis)) {
        for k in 0..half {
            for (t, (&hv, &gv)) in h.iter().zip(g).enumerate() {
                dst[(2 * k + t) % n] += hv * l[k] + gv * hh[k];
            }
        }
    }
    out
}
