//! On-disk formats: CFLD complex fields, 16-bit PNG holograms with a text
//! sidecar, grayscale images, and golden-vector manifests.

mod cfld;
mod golden;
mod hologram;
mod image;

pub use self::cfld::{decode_field, encode_field, read_field, write_field, CFLD_HEADER_LEN, CFLD_MAGIC, CFLD_VERSION};
pub use self::golden::{
    emit_goldens, load_manifest, replay_case, replay_manifest, GoldenCase, GoldenManifest, ReplayOutcome,
    MANIFEST_FILE,
};
pub use self::hologram::{phase_to_pixel, read_hologram_png, sidecar_path, write_hologram_png};
pub use self::image::{load_gray8, load_image, load_image_resized, resize_bilinear, save_gray8};
