//! Regenerates the shipped mesh assets. Run from the workspace root:
//! `cargo run -p hopf-core --example gen_assets`.

use hopf_core::corpus::genus2_implicit;
use hopf_core::surfaces::mesh::marching_tetrahedra;

fn main() {
    let surface = genus2_implicit();
    // Resolution chosen so no grid plane passes exactly through the
    // handle axes and the mesh resolves both handles cleanly.
    let mesh = marching_tetrahedra(&surface, [96, 64, 32]).expect("valid level-set mesh");
    eprintln!(
        "genus2: V = {}, E = {}, F = {}, chi = {}",
        mesh.vertex_count(),
        mesh.edge_count(),
        mesh.face_count(),
        mesh.euler_characteristic()
    );
    assert_eq!(mesh.euler_characteristic(), -2, "level-set mesh must have genus 2");
    std::fs::create_dir_all("assets").expect("create assets dir");
    std::fs::write("assets/genus2.off", mesh.to_off()).expect("write mesh");
    eprintln!("wrote assets/genus2.off");
}
