use std::process::ExitCode;

fn main() -> ExitCode {
    match plankit::cli::run(std::env::args_os()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            if let Some(e) = err.downcast_ref::<clap::Error>() {
                let _ = e.print();
                return ExitCode::from(e.exit_code() as u8);
            }
            let chain: Vec<String> = err.chain().map(|c| c.to_string()).collect();
            eprintln!("{}", serde_json::json!({ "error": chain.join(": "), "causes": chain }));
            ExitCode::FAILURE
        }
    }
}
