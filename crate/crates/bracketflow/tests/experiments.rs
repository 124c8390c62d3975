use bracketflow::config::parse;
use bracketflow::exec::RayonExecutor;
use bracketflow::experiments::{execute, validate, Outcome, Task};

const LINEAR: &str = r#"
[scenario]
name = "linear"
family = "sinusoid"
n = 2
p = 2
a = [0.5, 1.0, -0.3, 0.2]
b = [1.0, 0.2, 0.0, 1.0]
lambda = [1.0, 2.0]
omegas_rad_s = [1.0, 2.0]
"#;

const QUARTIC: &str = r#"
[scenario]
name = "quartic"
lambda = 1.0
omega_rad_s = 1.0
"#;

fn run(head: &str, scenario: &str, tail: &str) -> Outcome {
    let cfg = parse(&format!("{head}\noutput = \"o\"\n{scenario}\n{tail}")).unwrap();
    let plan = validate(&cfg).unwrap();
    execute(&plan, &RayonExecutor::new(2).unwrap()).unwrap()
}

fn artifact<'a>(o: &'a Outcome, path: &str) -> &'a str {
    &o.artifacts.iter().find(|a| a.path.to_str() == Some(path)).unwrap_or_else(|| panic!("{path}")).contents
}

fn invalid(text: &str) -> String {
    validate(&parse(text).unwrap()).unwrap_err().0
}

#[test]
fn sampled_starts_are_seeded_and_inside_the_ball() {
    let text = format!(
        "experiment = \"converge\"\noutput = \"o\"\n{LINEAR}\n[grid]\njs = [1.0]\nhorizon_s = 1.0\n\
         sample = {{ center = [0.5, -0.5], radius = 0.25, count = 40, seed = 3 }}\n"
    );
    let starts = |t: &str| match validate(&parse(t).unwrap()).unwrap().task {
        Task::Converge { cfg, .. } => cfg.x0s,
        _ => unreachable!(),
    };
    let a = starts(&text);
    assert_eq!(a, starts(&text));
    assert_eq!(a.len(), 40);
    assert!(a.iter().all(|x| ((x[0] - 0.5).powi(2) + (x[1] + 0.5).powi(2)).sqrt() <= 0.25));
    assert_ne!(a, starts(&text.replace("seed = 3", "seed = 4")));
}

#[test]
fn gd_report_table_and_decay_panel() {
    let o = run("experiment = \"gd-report\"", LINEAR, "[gd]\njs = [10.0, 100.0]\nwindow_s = 6.0\n");
    let csv = artifact(&o, "gd_report.csv");
    assert!(csv.starts_with("j,index,channel,metric,value,method\n"));
    for metric in ["c1_limit_gap", "c2_difference", "c3_coupling"] {
        assert!(csv.contains(metric), "{metric}");
    }
    let panel = artifact(&o, "plotdata/gd_decay.dat");
    let rows: Vec<&str> = panel.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(rows.len(), 2);
    assert!(o.verdicts.iter().filter(|v| v.required).all(|v| v.passed), "{:?}", o.verdicts);
}

#[test]
fn quartic_brackets_hold_on_the_output_grid() {
    let o = run("experiment = \"brackets-verify\"", QUARTIC, "[brackets]\npsi_min = 0.01\npsi_max = 10.0\npoints = 40\n");
    assert_eq!(o.verdicts.len(), 2);
    assert!(o.verdicts.iter().all(|v| v.passed), "{:?}", o.verdicts);
    let grid = artifact(&o, "bracket_grid.csv");
    let psi: Vec<f64> = grid.lines().skip(1).map(|l| l.rsplit(',').next().unwrap().parse().unwrap()).collect();
    assert_eq!(psi.len(), 40);
    assert!((psi[0] - 0.01).abs() < 1e-12 && (psi[39] - 10.0).abs() < 1e-9, "{psi:?}");
    assert!(psi.windows(2).all(|w| w[1] > w[0]));
}

#[test]
fn quartic_probe_reports_the_expected_negative() {
    let o = run(
        "experiment = \"lues\"",
        QUARTIC,
        "[probe]\njs = [inf]\ndelta = 0.5\nepsilons = [0.5, 0.2]\nattraction_time_s = 10.0\nduration_s = 15.0\n\
         x0s = [[0.5], [-0.3]]\nexpect = false\n",
    );
    let lues = o.verdicts.iter().find(|v| v.name == "lues.verdict").unwrap();
    assert!(lues.passed);
    assert!(artifact(&o, "summary.txt").contains("exponential from j0 = none"));
    let cells = artifact(&o, "probe_cells.csv");
    assert_eq!(cells.lines().count(), 3);
    assert!(o.artifacts.iter().any(|a| a.path.to_str() == Some("plotdata/distance_j_inf.dat")));
}

#[test]
fn experiment_and_scenario_mismatches_are_rejected() {
    let sawtooth = "[scenario]\nname = \"linear\"\nfamily = \"sawtooth\"\nn = 1\np = 1\na = [1.0]\nb = [1.0]\nlambda = [1.0]\ninitial = [1.0]\n";
    let msg = invalid(&format!("experiment = \"expansion-residual\"\noutput = \"o\"\n{sawtooth}\n[expansion]\nj = 10.0\nhorizon_s = 1.0\n"));
    assert!(msg.contains("sinusoid"), "{msg}");
    let formation = "[scenario]\nname = \"formation\"\nagents = 2\nedges = [[0, 1]]\ntargets = [1.0]\ninitial = [0, 0, 0, 2, 0, 0]\n";
    let msg = invalid(&format!(
        "experiment = \"brackets-verify\"\noutput = \"o\"\n{formation}\n[brackets]\npsi_min = 0.1\npsi_max = 1.0\n"
    ));
    assert!(msg.contains("brackets-verify"), "{msg}");
    let msg = invalid(&format!("experiment = \"converge\"\noutput = \"o\"\n{QUARTIC}"));
    assert!(msg.contains("[grid]"), "{msg}");
    let msg = invalid(&format!("experiment = \"freq-check\"\noutput = \"o\"\n{QUARTIC}\n[frequencies]\nagents = 9\n"));
    assert!(msg.contains("1..=4"), "{msg}");
}
