use std::io::Write;

fn main() {
    let env_config = std::env::var_os(omega_bergman_cli::CONFIG_ENV).map(Into::into);
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    let code = omega_bergman_cli::run(std::env::args_os(), env_config, &mut stdout.lock(), &mut stderr.lock());
    let _ = std::io::stdout().flush();
    std::process::exit(code);
}
