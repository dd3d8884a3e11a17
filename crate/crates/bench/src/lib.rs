//! Criterion benchmarks for the planner and geodesic integrator; see `benches/`.
