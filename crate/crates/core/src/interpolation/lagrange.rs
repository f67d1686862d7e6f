use crate::error::{LabError, Result};
use crate::linalg::{C64, ZERO};

/// Minimal separation of node values.
pub const NODE_COLLISION_TOL: f64 = 1e-12;

pub(crate) fn check_nodes(nodes: &[f64]) -> Result<()> {
    let mut order: Vec<usize> = (0..nodes.len()).collect();
    order.sort_by(|&i, &j| nodes[i].total_cmp(&nodes[j]));
    for w in order.windows(2) {
        let gap = (nodes[w[1]] - nodes[w[0]]).abs();
        if gap < NODE_COLLISION_TOL {
            return Err(LabError::CollidingNodes { i: w[0].min(w[1]), j: w[0].max(w[1]), gap });
        }
    }
    Ok(())
}

/// Barycentric weights `1/Π_{l≠j}(x_j − x_l)`, normalized by their largest modulus.
pub(crate) fn barycentric_weights(nodes: &[f64]) -> Vec<f64> {
    // accumulate in log form to stay finite for many nodes
    let logs: Vec<(f64, bool)> = nodes
        .iter()
        .enumerate()
        .map(|(j, &xj)| {
            let mut lg = 0.0;
            let mut neg = false;
            for (l, &xl) in nodes.iter().enumerate() {
                if l != j {
                    let d = xj - xl;
                    lg -= d.abs().ln();
                    neg ^= d < 0.0;
                }
            }
            (lg, neg)
        })
        .collect();
    let top = logs.iter().map(|p| p.0).fold(f64::NEG_INFINITY, f64::max);
    logs.iter().map(|&(lg, neg)| if neg { -(lg - top).exp() } else { (lg - top).exp() }).collect()
}

/// Value at `xi` of the polynomial of degree `nodes.len() − 1` through `(nodes[j], values[j])`.
///
/// Uses the barycentric form, which reproduces node values exactly.
pub fn lagrange_eval(values: &[C64], nodes: &[f64], xi: f64) -> Result<C64> {
    if values.len() != nodes.len() || nodes.is_empty() {
        return Err(LabError::DomainError(format!("{} values for {} nodes", values.len(), nodes.len())));
    }
    check_nodes(nodes)?;
    let w = barycentric_weights(nodes);
    Ok(barycentric(values, nodes, &w, xi))
}

pub(crate) fn barycentric(values: &[C64], nodes: &[f64], w: &[f64], xi: f64) -> C64 {
    if let Some(j) = nodes.iter().position(|&x| x == xi) {
        return values[j];
    }
    let mut num = ZERO;
    let mut den = 0.0;
    for ((v, &x), &wj) in values.iter().zip(nodes).zip(w) {
        let c = wj / (xi - x);
        num += v * c;
        den += c;
    }
    num / den
}
