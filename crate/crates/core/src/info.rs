//! Plug-in entropies and mutual information over exact probability tables
//! (nats, with 0·log 0 = 0).

/// H(p) of a probability vector.
pub fn entropy(probs: &[f64]) -> f64 {
    probs
        .iter()
        .filter(|&&p| p > 0.0)
        .map(|&p| -p * p.ln())
        .sum()
}

/// Joint table P(a, b) from per-item weights and two discrete codes.
pub fn joint_table(weights: &[f64], a: &[usize], na: usize, b: &[usize], nb: usize) -> Vec<Vec<f64>> {
    let mut t = vec![vec![0.0; nb]; na];
    for ((w, &i), &j) in weights.iter().zip(a).zip(b) {
        t[i][j] += w;
    }
    t
}

/// Row marginal of a joint table.
pub fn row_marginal(joint: &[Vec<f64>]) -> Vec<f64> {
    joint.iter().map(|r| r.iter().sum()).collect()
}

/// Column marginal of a joint table.
pub fn col_marginal(joint: &[Vec<f64>]) -> Vec<f64> {
    let nb = joint.first().map_or(0, Vec::len);
    (0..nb).map(|j| joint.iter().map(|r| r[j]).sum()).collect()
}

/// H(B | A) = Σ_a P(a) H(B | A = a).
pub fn conditional_entropy(joint: &[Vec<f64>]) -> f64 {
    joint
        .iter()
        .map(|row| {
            let pa: f64 = row.iter().sum();
            if pa > 0.0 {
                let cond: Vec<f64> = row.iter().map(|v| v / pa).collect();
                pa * entropy(&cond)
            } else {
                0.0
            }
        })
        .sum()
}

/// I(A; B) = H(B) - H(B | A).
pub fn mutual_information(joint: &[Vec<f64>]) -> f64 {
    (entropy(&col_marginal(joint)) - conditional_entropy(joint)).max(0.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    const LN2: f64 = std::f64::consts::LN_2;

    #[test]
    fn entropy_examples() {
        assert_eq!(entropy(&[1.0, 0.0]), 0.0);
        assert!((entropy(&[0.5, 0.5]) - LN2).abs() < 1e-15);
        assert!((entropy(&[0.25; 4]) - 4f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn mutual_information_examples() {
        let independent = vec![vec![0.25, 0.25], vec![0.25, 0.25]];
        assert!(mutual_information(&independent).abs() < 1e-15);
        let copy = vec![vec![0.5, 0.0], vec![0.0, 0.5]];
        assert!((mutual_information(&copy) - LN2).abs() < 1e-15);
    }

    #[test]
    fn chain_rule() {
        let j = vec![vec![0.1, 0.2, 0.05], vec![0.3, 0.15, 0.2]];
        let flat: Vec<f64> = j.iter().flatten().copied().collect();
        let h_ab = entropy(&flat);
        let lhs = entropy(&row_marginal(&j)) + conditional_entropy(&j);
        assert!((h_ab - lhs).abs() < 1e-14);
    }
}
