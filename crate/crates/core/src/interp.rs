/// Piecewise-linear interpolation of `(xs, ys)` at `x`. `xs` must be
/// strictly increasing; values outside the range are held at the ends.
pub(crate) fn linear(xs: &[f64], ys: &[f64], x: f64) -> f64 {
    debug_assert_eq!(xs.len(), ys.len());
    let n = xs.len();
    if x <= xs[0] {
        return ys[0];
    }
    if x >= xs[n - 1] {
        return ys[n - 1];
    }
    // first index with xs[i] > x
    let i = xs.partition_point(|&v| v <= x);
    let (x0, x1) = (xs[i - 1], xs[i]);
    let w = (x - x0) / (x1 - x0);
    ys[i - 1] + w * (ys[i] - ys[i - 1])
}

#[cfg(test)]
mod tests {
    #[test]
    fn hits_nodes_and_midpoints() {
        let xs = [0.0, 1.0, 3.0];
        let ys = [0.0, 2.0, 6.0];
        assert_eq!(super::linear(&xs, &ys, 1.0), 2.0);
        assert_eq!(super::linear(&xs, &ys, 2.0), 4.0);
        assert_eq!(super::linear(&xs, &ys, -1.0), 0.0);
        assert_eq!(super::linear(&xs, &ys, 5.0), 6.0);
    }
}
