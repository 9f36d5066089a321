pub mod adev;
pub mod fringe;
pub mod optimize;
pub mod oracle_check;
pub mod sensitivity;

use crate::config::RunConfig;
use std::path::PathBuf;

/// Output path for a command: `<stem>_<suffix>.<ext>`.
pub fn out_path(config: &RunConfig, suffix: &str, ext: &str) -> PathBuf {
    let stem = config
        .output
        .clone()
        .unwrap_or_else(|| PathBuf::from("drum_out"));
    let mut name = stem
        .file_name()
        .map(|s| s.to_os_string())
        .unwrap_or_default();
    name.push(format!("_{suffix}.{ext}"));
    stem.with_file_name(name)
}

/// Human-readable description of every file this tool writes, plus a
/// default configuration to start from.
pub fn schema_text() -> String {
    let mut s = String::new();
    s.push_str(
        "Output file schemas\n\
         ===================\n\
         All quantities are SI: tesla, seconds, rad/s. CSV files start with a\n\
         commented metadata header (lines prefixed '# ') that re-parses as the\n\
         TOML run configuration which produced the file.\n\
         \n\
         fringe (csv):    <out>_fringe_{drum,drum_mc,ramsey,ramsey_mc}.csv\n\
                          columns: field_T,contrast\n\
         fringe (json):   <out>_fringe.json  {config, fringe_period_t, scans}\n\
         sensitivity:     <out>_sensitivity.json  serialized report; the\n\
                          'operational' field is present only when --mc-seconds > 0\n\
         adev (csv):      <out>_adev.csv\n\
                          columns: tau_s,adev_rad_s,adev_t,n_terms\n\
         adev (json):     <out>_adev.json  {config, curve, deviations_t, regimes,\n\
                          skipped_m}\n\
         optimize (csv):  <out>_optimize.csv\n\
                          columns: speed_hz,tau_opt_s,b_z_t,slope_per_t,\n\
                          sensitivity_t_per_sqrt_hz\n\
                          per-speed failures appear as '# failed <speed>: <why>'\n\
         optimize (json): <out>_optimize.json  {config, points, failures}\n\
         shot records:    columns: period_index,photons_plus,photons_minus,reference\n\
         \n\
         Input file schemas\n\
         ==================\n\
         contrast series: columns time_s,contrast (uniform sampling)\n\
         T2 profile:      columns speed_hz,t2_s (strictly increasing speeds)\n\
         \n\
         Default configuration\n\
         =====================\n",
    );
    for line in RunConfig::default().to_toml().lines() {
        s.push_str(line);
        s.push('\n');
    }
    s
}
