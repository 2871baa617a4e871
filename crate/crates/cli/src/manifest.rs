//! Command lines reproducing every reported experiment.

#[derive(Debug, Clone, PartialEq)]
pub struct Experiment {
    pub name: &'static str,
    pub description: &'static str,
    /// Arguments after the program name.
    pub args: Vec<String>,
}

impl Experiment {
    fn new(name: &'static str, description: &'static str, args: &str) -> Self {
        Self {
            name,
            description,
            args: args.split_whitespace().map(str::to_string).collect(),
        }
    }

    /// Full argv including the program name and an output path.
    pub fn argv_with_output(&self, output: &str) -> Vec<String> {
        let mut v = vec!["dde-lab".to_string()];
        v.extend(self.args.iter().cloned());
        v.push("--output".into());
        v.push(output.into());
        v
    }
}

pub fn paper_experiments() -> Vec<Experiment> {
    vec![
        Experiment::new(
            "growth-fit",
            "exponential envelope of the autonomous scalar solution against the rightmost root",
            "growth-fit --a -0.15 --b -6.0 --tau -8.0 --history poly10 --scheme ie --h 0.01 --T 200 --t-start 50",
        ),
        Experiment::new(
            "companion-stability",
            "spectral radius, summability and Ritt profiles of the companion matrix",
            "stability --a -0.15 --b -6.0 --tau -0.257 --h 0.001 --N 200000 --profile-stride 1000",
        ),
        Experiment::new(
            "scalar-auto-ie",
            "autonomous scalar equation, implicit Euler",
            "scalar --a -0.15 --b -6.0 --tau -0.257 --history poly10 --scheme ie --h 0.001 --T 40 --format csv",
        ),
        Experiment::new(
            "scalar-auto-lt",
            "autonomous scalar equation, Lie-Trotter",
            "scalar --a -0.15 --b -6.0 --tau -0.257 --history poly10 --scheme lt --h 0.001 --T 40 --format csv",
        ),
        Experiment::new(
            "scalar-nonauto-ie",
            "non-autonomous scalar equation a(t) = a t, implicit Euler",
            "scalar --a -0.15 --a-mode linear --b -6.0 --tau -8.0 --history poly10 --scheme ie --h 0.1 --T 40 --format csv",
        ),
        Experiment::new(
            "scalar-nonauto-lt",
            "non-autonomous scalar equation a(t) = a t, Lie-Trotter",
            "scalar --a -0.15 --a-mode linear --b -6.0 --tau -8.0 --history poly10 --scheme lt --h 0.1 --T 40 --format csv",
        ),
        Experiment::new(
            "oracle",
            "Fourier-quadrature benchmark for the non-autonomous equation",
            "oracle --a -0.15 --b -6.0 --tau -8.0 --t-start 0 --t-end 10 --dt 0.1 --omega-max 4.0 --nodes 2001 --format json --residual",
        ),
        Experiment::new(
            "bell-profile",
            "implicit Euler against Lie-Trotter for a(t) = a t, with the error profile at h = 0.1",
            "convergence --a -0.15 --a-mode linear --b -6.0 --tau -8.0 --history poly10 --pair ie-lt --h-list 0.1,0.05,0.025,0.0125 --T 40 --profile",
        ),
        Experiment::new(
            "kernel-vs-grid",
            "exponential-kernel history against the grid ring buffer",
            "convergence --a -0.15 --b -6.0 --tau -8.0 --history poly10 --pair kernel-grid-ie --h-list 0.04,0.02,0.01,0.005 --T 20",
        ),
        Experiment::new("pde-auto-ie", "autonomous reaction-diffusion, implicit Euler", "pde --preset paper-auto-pde --scheme ie --format csv"),
        Experiment::new("pde-auto-lt", "autonomous reaction-diffusion, Lie-Trotter", "pde --preset paper-auto-pde --scheme lt --format csv"),
        Experiment::new(
            "pde-nonauto-ie",
            "non-autonomous reaction-diffusion, implicit Euler",
            "pde --preset paper-nonauto-pde --scheme ie --format csv",
        ),
        Experiment::new(
            "pde-nonauto-lt",
            "non-autonomous reaction-diffusion, Lie-Trotter",
            "pde --preset paper-nonauto-pde --scheme lt --format csv",
        ),
        Experiment::new("timing-pde-auto", "runtime of both schemes, autonomous PDE", "timing --target pde-auto --repetitions 3"),
        Experiment::new("timing-pde-nonauto", "runtime of both schemes, non-autonomous PDE", "timing --target pde-nonauto --repetitions 3"),
    ]
}
