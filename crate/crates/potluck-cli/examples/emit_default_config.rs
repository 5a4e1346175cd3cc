//! Print the default scenario config as TOML.

fn main() {
    print!(
        "{}",
        potluck_cli::to_toml_string(&potluck_core::ScenarioConfig::default())
    );
}
