#include <doctest.h>
#include <graphtopo/csv.hpp>

#include <cmath>
#include <sstream>

using namespace graphtopo;

TEST_CASE("read matrix")
{
    std::istringstream in("1,2,3\n4,5,6\n");
    const Matrix m = io::read_matrix(in);
    CHECK(m.rows() == 2);
    CHECK(m.cols() == 3);
    CHECK(m(1, 2) == 6.0);

    std::istringstream hdr("a,b\n1,2\n3,4\n");
    CHECK(io::read_matrix(hdr, {true, false}).rows() == 2);
}

TEST_CASE("ragged rows report the line")
{
    std::istringstream in("1,2,3\n4,5\n");
    try {
        io::read_matrix(in);
        FAIL("expected InvalidInput");
    } catch (const InvalidInput& e) {
        CHECK(std::string(e.what()).find("row length mismatch at line 2") != std::string::npos);
    }
}

TEST_CASE("missing cells and non-finite values")
{
    std::istringstream strict("1,,3\n4,5,6\n");
    CHECK_THROWS_AS(io::read_matrix(strict), InvalidInput);
    std::istringstream loose("1,,3\n4,5,6\n");
    const Matrix m = io::read_matrix(loose, {false, true});
    CHECK(std::isnan(m(0, 1)));
    std::istringstream nan_in("1,nan\n2,3\n");
    CHECK_THROWS_AS(io::read_matrix(nan_in), InvalidInput);
    std::istringstream junk("1,x\n2,3\n");
    CHECK_THROWS_AS(io::read_matrix(junk), InvalidInput);
}

TEST_CASE("17 significant digits round trip")
{
    Matrix m(2, 2);
    m << 0.1, 1.0 / 3.0, -2.5e-300, 12345678.901234567;
    std::ostringstream out;
    io::write_matrix(out, m);
    std::istringstream in(out.str());
    CHECK(io::read_matrix(in) == m);
    CHECK(std::stod(io::format_double(std::acos(-1.0))) == std::acos(-1.0));
}

TEST_CASE("edge lists")
{
    Matrix w = Matrix::Zero(3, 3);
    w(0, 2) = w(2, 0) = 0.5;
    std::ostringstream out;
    io::write_edge_list(out, Graph::undirected(w));
    CHECK(out.str() == "1,3,0.5\n");
    std::istringstream in(out.str());
    CHECK(io::read_edge_list(in, 3, false).weights() == w);

    Matrix d = Matrix::Zero(3, 3);
    d(1, 0) = 2.0;
    std::ostringstream dout;
    io::write_edge_list(dout, Graph::directed(d));
    CHECK(dout.str() == "2,1,2\n");
    std::istringstream din(dout.str());
    CHECK(io::read_edge_list(din, 3, true).weights() == d);
}
