#![no_main]

use cavity_core::mesh::{parse_mesh, write_mesh};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(mesh) = parse_mesh(text) {
        // accepted meshes survive a write/parse round trip unchanged
        let again = parse_mesh(&write_mesh(&mesh)).expect("written mesh parses");
        assert_eq!(again.nodes(), mesh.nodes());
        assert_eq!(again.tets(), mesh.tets());
    }
});
