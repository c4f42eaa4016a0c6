//! Bundled experiment configs, one per reproduced figure.

const PRESETS: &[(&str, &str)] = &[
    ("chicken_fpq", include_str!("../../presets/chicken_fpq.toml")),
    ("chicken_qq", include_str!("../../presets/chicken_qq.toml")),
    ("chicken_wolf_l1", include_str!("../../presets/chicken_wolf_l1.toml")),
    ("chicken_wolf_l2", include_str!("../../presets/chicken_wolf_l2.toml")),
    ("foe_scalings", include_str!("../../presets/foe_scalings.toml")),
    ("foe_scalings_pm1", include_str!("../../presets/foe_scalings_pm1.toml")),
    ("foe_spatial_indq", include_str!("../../presets/foe_spatial_indq.toml")),
    ("foe_spatial_l2", include_str!("../../presets/foe_spatial_l2.toml")),
    ("foe_stateless_indq", include_str!("../../presets/foe_stateless_indq.toml")),
    ("foe_stateless_l1forget", include_str!("../../presets/foe_stateless_l1forget.toml")),
    ("foe_stateless_l2", include_str!("../../presets/foe_stateless_l2.toml")),
    ("ipd_fpq", include_str!("../../presets/ipd_fpq.toml")),
    ("ipd_qq", include_str!("../../presets/ipd_qq.toml")),
    ("ish_fpq", include_str!("../../presets/ish_fpq.toml")),
    ("ish_qq", include_str!("../../presets/ish_qq.toml")),
    ("memory1_tft", include_str!("../../presets/memory1_tft.toml")),
    ("memoryless_tft", include_str!("../../presets/memoryless_tft.toml")),
];

pub fn preset(name: &str) -> Option<&'static str> {
    PRESETS.iter().find(|(n, _)| *n == name).map(|(_, text)| *text)
}

pub fn preset_names() -> Vec<&'static str> {
    PRESETS.iter().map(|(n, _)| *n).collect()
}
