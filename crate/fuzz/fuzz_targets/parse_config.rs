#![no_main]

use latmesh_cli::config::parse_config_text;
use latmesh_cli::RunConfig;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(map) = parse_config_text(text) {
        let cfg: RunConfig = serde_json_roundtrip(&map);
        for sub in latmesh_cli::SUBCOMMANDS {
            let _ = cfg.check_schema(sub);
        }
    }
});

fn serde_json_roundtrip(map: &serde_json::Map<String, serde_json::Value>) -> RunConfig {
    serde_json::from_value(serde_json::Value::Object(map.clone())).expect("accepted config re-parses")
}
