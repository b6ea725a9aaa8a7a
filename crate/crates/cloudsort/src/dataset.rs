// Copyright 2026 The cloudsort Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

//! Dataset directory scanning:
//! `<root>/<category>/<category>_<n>/<category>_<n>_<video>_<frame>.pcd`.

use std::fs;
use std::path::Path;

use cloudsort_core::evaluation::{DatasetIndex, DatasetRecord};

/// Splits `<instance>_<video>_<frame>.pcd` given the instance directory name.
pub fn parse_frame_name(instance: &str, file_name: &str) -> Option<(u32, u32)> {
    let stem = file_name.strip_suffix(".pcd")?;
    let rest = stem.strip_prefix(instance)?.strip_prefix('_')?;
    let (video, frame) = rest.split_once('_')?;
    Some((video.parse().ok()?, frame.parse().ok()?))
}

fn sorted_entries(dir: &Path) -> std::io::Result<Vec<fs::DirEntry>> {
    let mut entries: Vec<_> = fs::read_dir(dir)?.collect::<Result<_, _>>()?;
    entries.sort_by_key(|e| e.file_name());
    Ok(entries)
}

/// Builds the index by directory scan. Files that do not follow the naming
/// convention are ignored. Records come out sorted.
pub fn scan_dataset(root: impl AsRef<Path>) -> std::io::Result<DatasetIndex> {
    let mut records = Vec::new();
    for cat in sorted_entries(root.as_ref())? {
        if !cat.file_type()?.is_dir() {
            continue;
        }
        let category = cat.file_name().to_string_lossy().into_owned();
        for inst in sorted_entries(&cat.path())? {
            let instance = inst.file_name().to_string_lossy().into_owned();
            let numbered = instance
                .strip_prefix(category.as_str())
                .and_then(|r| r.strip_prefix('_'))
                .is_some_and(|n| n.parse::<u32>().is_ok());
            if !inst.file_type()?.is_dir() || !numbered {
                continue;
            }
            for file in sorted_entries(&inst.path())? {
                let name = file.file_name().to_string_lossy().into_owned();
                if let Some((video, frame)) = parse_frame_name(&instance, &name) {
                    records.push(DatasetRecord {
                        path: file.path().to_string_lossy().into_owned(),
                        category: category.clone(),
                        instance: instance.clone(),
                        video,
                        frame,
                    });
                }
            }
        }
    }
    records.sort_by(|a, b| {
        (&a.category, &a.instance, a.video, a.frame).cmp(&(&b.category, &b.instance, b.video, b.frame))
    });
    Ok(DatasetIndex { records })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn frame_names() {
        assert_eq!(
            parse_frame_name("bell_pepper_2", "bell_pepper_2_1_17.pcd"),
            Some((1, 17))
        );
        assert_eq!(parse_frame_name("apple_1", "apple_1_4.pcd"), None);
        assert_eq!(parse_frame_name("apple_1", "apple_10_1_1.pcd"), None);
    }

    #[test]
    fn scans_tree() {
        let dir = tempfile::tempdir().unwrap();
        for (cat, inst, v, f) in [("apple", 1, 2, 10), ("apple", 1, 2, 9), ("bell_pepper", 3, 1, 1)] {
            let d = dir.path().join(cat).join(format!("{cat}_{inst}"));
            fs::create_dir_all(&d).unwrap();
            fs::write(d.join(format!("{cat}_{inst}_{v}_{f}.pcd")), "").unwrap();
        }
        fs::write(dir.path().join("apple/apple_1/notes.txt"), "").unwrap();
        let idx = scan_dataset(dir.path()).unwrap();
        let got: Vec<_> = idx
            .records
            .iter()
            .map(|r| (r.category.as_str(), r.instance.as_str(), r.video, r.frame))
            .collect();
        assert_eq!(
            got,
            vec![
                ("apple", "apple_1", 2, 9),
                ("apple", "apple_1", 2, 10),
                ("bell_pepper", "bell_pepper_3", 1, 1)
            ]
        );
    }
}
