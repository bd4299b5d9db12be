use clap::Parser;

use riskfuse_cli::commands::{self, Cli, Command};
use riskfuse_cli::CliError;

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Score(a) => commands::cmd_score(&a),
        Command::Simulate(a) => {
            let s = commands::cmd_simulate(&a)?;
            println!("{}", serde_json::to_string(&s).expect("summary serializes"));
            Ok(())
        }
        Command::Fit(a) => commands::cmd_fit(&a).map(|_| ()),
        Command::Evaluate(a) => commands::cmd_evaluate(&a).map(|_| ()),
        Command::Hazards(a) => commands::cmd_hazards(&a),
        Command::Serve(a) => {
            let scorer = commands::serve_scorer(&a)?;
            let rt =
                tokio::runtime::Runtime::new().map_err(|e| CliError::internal(e.to_string()))?;
            rt.block_on(riskfuse_cli::service::serve(scorer, &a.bind))
        }
    }
}

fn main() {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    if let Err(e) = run(Cli::parse()) {
        eprintln!("{}", e.to_json());
        std::process::exit(e.exit_code());
    }
}
