#include "hwd/analyze.hpp"

#include <Eigen/Eigenvalues>

#include "hwd/error.hpp"
#include "hwd/io.hpp"

namespace hwd {

Embedding classical_mds(const DistanceMatrix& distances, std::size_t a) {
  const Index n = distances.size();
  if (n == 0) throw Error(ErrorKind::InvalidParam, "empty distance matrix");
  Embedding out;
  if (n == 1) {
    if (a != 1) throw Error(ErrorKind::InvalidParam, "a single point embeds in one dimension");
    out.coords = Matrix::Zero(1, 1);
    out.eigenvalues = Vector::Zero(1);
    return out;
  }
  if (a < 1 || static_cast<Index>(a) > n - 1) throw Error(ErrorKind::InvalidParam, "embedding dimension must be in [1, N-1]");
  const Matrix sq = distances.entries().cwiseProduct(distances.entries());
  const Matrix j = Matrix::Identity(n, n) - Matrix::Constant(n, n, 1.0 / static_cast<double>(n));
  Matrix b = -0.5 * j * sq * j;
  b = 0.5 * (b + b.transpose()).eval();
  const Eigen::SelfAdjointEigenSolver<Matrix> solver(b);
  const Vector& values = solver.eigenvalues();  // ascending
  for (Index i = 0; i < n; ++i) {
    if (values[i] < 0.0) out.negative_mass -= values[i];
  }
  const auto dims = static_cast<Index>(a);
  out.coords.resize(n, dims);
  out.eigenvalues.resize(dims);
  for (Index c = 0; c < dims; ++c) {
    const Index src = n - 1 - c;
    const double lambda = std::max(values[src], 0.0);
    Vector v = solver.eigenvectors().col(src);
    Index arg = 0;
    v.cwiseAbs().maxCoeff(&arg);
    if (v[arg] < 0.0) v = -v;
    out.eigenvalues[c] = lambda;
    out.coords.col(c) = v * std::sqrt(lambda);
  }
  return out;
}

void write_coordinates_csv(std::ostream& out, std::span<const std::string> ids, const Embedding& embedding,
                           std::span<const std::size_t> labels) {
  const Index n = embedding.coords.rows();
  if (ids.size() != static_cast<std::size_t>(n) || (!labels.empty() && labels.size() != ids.size())) {
    throw Error(ErrorKind::SizeError, "ids, coordinates and labels differ in length");
  }
  out << "id,x,y,cluster_label\n";
  for (Index i = 0; i < n; ++i) {
    const double x = embedding.coords(i, 0);
    const double y = embedding.coords.cols() > 1 ? embedding.coords(i, 1) : 0.0;
    out << csv_field(ids[static_cast<std::size_t>(i)]) << ',' << format_double(x) << ',' << format_double(y) << ',';
    if (!labels.empty()) out << labels[static_cast<std::size_t>(i)];
    out << '\n';
  }
}

}  // namespace hwd
