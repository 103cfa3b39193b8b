use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use super::{parse_calib, parse_label_file, serialize_calib, serialize_label_file, Calibration, FrameSample, Object3D};
use crate::error::{Error, Result};

/// A KITTI object directory: `image_2/<id>.png`, `label_2/<id>.txt`,
/// `calib/<id>.txt`.
#[derive(Debug, Clone)]
pub struct KittiDataset {
    root: PathBuf,
}

impl KittiDataset {
    pub fn new(root: impl Into<PathBuf>) -> Self {
        Self { root: root.into() }
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn image_path(&self, id: &str) -> PathBuf {
        self.root.join("image_2").join(format!("{id}.png"))
    }

    pub fn label_path(&self, id: &str) -> PathBuf {
        self.root.join("label_2").join(format!("{id}.txt"))
    }

    pub fn calib_path(&self, id: &str) -> PathBuf {
        self.root.join("calib").join(format!("{id}.txt"))
    }

    pub fn load_labels(&self, id: &str) -> Result<Vec<Object3D>> {
        read_labels(&self.label_path(id))
    }

    pub fn load_calib(&self, id: &str) -> Result<Calibration> {
        let path = self.calib_path(id);
        let text = fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
        parse_calib(&text).map_err(|e| e.in_file(path))
    }

    /// `(width, height)` from the PNG header without decoding pixels.
    pub fn image_dims(&self, id: &str) -> Result<(u32, u32)> {
        let path = self.image_path(id);
        image::image_dimensions(&path).map_err(|source| Error::Image { path, source })
    }

    pub fn load_image(&self, id: &str) -> Result<image::RgbImage> {
        let path = self.image_path(id);
        image::open(&path)
            .map(|img| img.to_rgb8())
            .map_err(|source| Error::Image { path, source })
    }

    pub fn load_frame(&self, id: &str) -> Result<FrameSample> {
        let image = self.load_image(id)?;
        let objects = self.load_labels(id)?;
        let calib = self.load_calib(id)?;
        Ok(FrameSample::new(id, image, objects, calib))
    }

    /// Ids whose image, label or calibration file is absent.
    pub fn missing_frames<'a>(&self, ids: &'a [String]) -> Vec<&'a str> {
        ids.iter()
            .map(String::as_str)
            .filter(|id| {
                !(self.image_path(id).is_file() && self.label_path(id).is_file() && self.calib_path(id).is_file())
            })
            .collect()
    }

    /// Writes the PNG, label file and a P2-only calibration file for `sample`.
    pub fn write_frame(&self, sample: &FrameSample) -> Result<()> {
        self.write_image_and_labels(sample)?;
        let calib_path = self.calib_path(&sample.frame_id);
        write_file(&calib_path, serialize_calib(&sample.calib).as_bytes())
    }

    /// Like [`write_frame`](Self::write_frame) but leaves `calib/` untouched,
    /// for callers that copy the original calibration file verbatim.
    pub fn write_image_and_labels(&self, sample: &FrameSample) -> Result<()> {
        let image_path = self.image_path(&sample.frame_id);
        ensure_parent(&image_path)?;
        sample
            .image
            .save_with_format(&image_path, image::ImageFormat::Png)
            .map_err(|source| Error::Image {
                path: image_path.clone(),
                source,
            })?;
        let label_path = self.label_path(&sample.frame_id);
        write_file(&label_path, serialize_label_file(&sample.objects).as_bytes())
    }
}

fn ensure_parent(path: &Path) -> Result<()> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
    }
    Ok(())
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    ensure_parent(path)?;
    fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

fn read_labels(path: &Path) -> Result<Vec<Object3D>> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_label_file(&text).map_err(|e| e.in_file(path))
}

/// Every `*.txt` file in `dir`, keyed by file stem.
pub fn read_label_dir(dir: &Path) -> Result<BTreeMap<String, Vec<Object3D>>> {
    let entries = fs::read_dir(dir).map_err(|e| Error::io(dir, e))?;
    let mut out = BTreeMap::new();
    for entry in entries {
        let path = entry.map_err(|e| Error::io(dir, e))?.path();
        if path.extension().and_then(|e| e.to_str()) != Some("txt") || !path.is_file() {
            continue;
        }
        let Some(stem) = path.file_stem().and_then(|s| s.to_str()) else {
            continue;
        };
        out.insert(stem.to_string(), read_labels(&path)?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kitti_io::{BBox2D, ClassId, Dims};
    use image::{Rgb, RgbImage};

    #[test]
    fn write_then_load_frame() {
        let dir = tempfile::tempdir().unwrap();
        let ds = KittiDataset::new(dir.path());
        let mut image = RgbImage::new(40, 30);
        image.put_pixel(3, 4, Rgb([9, 8, 7]));
        let car = Object3D::new(
            ClassId::Car,
            BBox2D::new(1.0, 2.0, 30.0, 20.0),
            Dims::new(1.5, 1.6, 3.9),
            [0.5, 1.7, 12.25],
            0.3,
        );
        let sample = FrameSample::new("000007", image, vec![car], Calibration::pinhole(700.0, 20.0, 15.0));
        ds.write_frame(&sample).unwrap();

        assert_eq!(ds.image_dims("000007").unwrap(), (40, 30));
        assert_eq!(ds.load_frame("000007").unwrap(), sample);
        let ids = vec!["000007".to_string(), "000008".to_string()];
        assert_eq!(ds.missing_frames(&ids), vec!["000008"]);

        let dir_labels = read_label_dir(&dir.path().join("label_2")).unwrap();
        assert_eq!(dir_labels.len(), 1);
        assert_eq!(dir_labels["000007"], sample.objects);
    }

    #[test]
    fn boxes_are_clamped_on_load() {
        let car = Object3D::new(
            ClassId::Car,
            BBox2D::new(-5.0, 2.0, 50.0, 40.0),
            Dims::new(1.0, 1.0, 1.0),
            [0.0, 0.0, 10.0],
            0.0,
        );
        let sample = FrameSample::new(
            "x",
            RgbImage::new(40, 30),
            vec![car],
            Calibration::pinhole(1.0, 0.0, 0.0),
        );
        assert_eq!(sample.objects[0].bbox, BBox2D::new(0.0, 2.0, 40.0, 30.0));
        assert_eq!(sample.sources, vec!["x".to_string()]);
    }

    #[test]
    fn label_errors_name_the_file() {
        let dir = tempfile::tempdir().unwrap();
        fs::write(dir.path().join("000001.txt"), "Car 0 0\n").unwrap();
        let err = read_label_dir(dir.path()).unwrap_err().to_string();
        assert!(err.contains("000001.txt"), "{err}");
        assert!(err.contains("line 1"), "{err}");
    }
}
