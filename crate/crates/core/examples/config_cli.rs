//! Drive the command line from code: a config file supplies defaults that flags override.

use keller::cli::{parse_config, resolve_options, run};

fn main() -> keller::Result<()> {
    let dir = std::env::temp_dir().join("keller_config_cli");
    std::fs::create_dir_all(&dir)?;
    let cfg = dir.join("run.conf");
    let text = format!("# defaults\njobs = 2\nseed = 5\nbudget_conflicts = 100000\nout-dir = {}\n", dir.display());
    std::fs::write(&cfg, &text)?;

    let opts = resolve_options(&parse_config(&text)?)?;
    println!("from file: jobs={} seed={} out={}", opts.jobs, opts.seed, opts.out_dir.display());

    let code = run(["keller", "--config", cfg.to_str().unwrap(), "--seed", "9", "encode", "-n", "3", "-s", "2"]);
    println!("encode exit code {code}");
    let code = run(["keller", "encode", "-n", "1", "-s", "2"]);
    println!("bad instance exit code {code}");
    Ok(())
}
