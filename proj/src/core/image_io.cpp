#include "skyflux/core/image_io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include <opencv2/core.hpp>
#include <opencv2/imgcodecs.hpp>

namespace skyflux {

namespace {

Frame frame_from_mat(const cv::Mat& img) {
    if (img.empty())
        throw UnreadableImage("image decode produced no pixels");
    if (img.depth() != CV_8U)
        throw UnsupportedBitDepth("only 8-bit images are supported");
    int ch = img.channels();
    if (ch != 1 && ch != 3)
        throw UnsupportedBitDepth("only 1- or 3-channel images are supported");

    Frame f(img.cols, img.rows, ch);
    for (int y = 0; y < img.rows; ++y) {
        const uint8_t* row = img.ptr<uint8_t>(y);
        for (int x = 0; x < img.cols; ++x) {
            if (ch == 1) {
                f.at(x, y, 0) = row[x] / 255.0;
            } else {
                // OpenCV decodes BGR; Frame stores RGB.
                f.at(x, y, 0) = row[x * 3 + 2] / 255.0;
                f.at(x, y, 1) = row[x * 3 + 1] / 255.0;
                f.at(x, y, 2) = row[x * 3 + 0] / 255.0;
            }
        }
    }
    return f;
}

cv::Mat mat_from_frame(const Frame& f) {
    cv::Mat img(f.height, f.width, f.channels == 1 ? CV_8UC1 : CV_8UC3);
    for (int y = 0; y < f.height; ++y) {
        uint8_t* row = img.ptr<uint8_t>(y);
        for (int x = 0; x < f.width; ++x) {
            if (f.channels == 1) {
                row[x] = cv::saturate_cast<uint8_t>(std::lround(f.at(x, y, 0) * 255.0));
            } else {
                row[x * 3 + 0] = cv::saturate_cast<uint8_t>(std::lround(f.at(x, y, 2) * 255.0));
                row[x * 3 + 1] = cv::saturate_cast<uint8_t>(std::lround(f.at(x, y, 1) * 255.0));
                row[x * 3 + 2] = cv::saturate_cast<uint8_t>(std::lround(f.at(x, y, 0) * 255.0));
            }
        }
    }
    return img;
}

} // namespace

Frame load_frame(const std::string& path) {
    cv::Mat img = cv::imread(path, cv::IMREAD_UNCHANGED);
    if (img.empty())
        throw UnreadableImage("cannot read image: " + path);
    if (img.channels() == 4 && img.depth() == CV_8U) {
        cv::Mat bgr(img.rows, img.cols, CV_8UC3);
        cv::mixChannels({img}, {bgr}, {0, 0, 1, 1, 2, 2});
        img = bgr;
    }
    return frame_from_mat(img);
}

void save_frame(const Frame& frame, const std::string& path) {
    if (!cv::imwrite(path, mat_from_frame(frame)))
        throw UnreadableImage("cannot write image: " + path);
}

std::vector<uint8_t> encode_png(const Frame& frame) {
    std::vector<uint8_t> out;
    if (!cv::imencode(".png", mat_from_frame(frame), out))
        throw UnreadableImage("PNG encode failed");
    return out;
}

std::vector<uint8_t> encode_jpeg(const Frame& frame, int quality) {
    std::vector<uint8_t> out;
    std::vector<int> params{cv::IMWRITE_JPEG_QUALITY, std::clamp(quality, 1, 100)};
    if (!cv::imencode(".jpg", mat_from_frame(frame), out, params))
        throw UnreadableImage("JPEG encode failed");
    return out;
}

Frame decode_image(const std::vector<uint8_t>& bytes) {
    cv::Mat img = cv::imdecode(bytes, cv::IMREAD_UNCHANGED);
    return frame_from_mat(img);
}

Frame quantize8(const Frame& frame) {
    Frame q = frame;
    for (double& v : q.data)
        v = std::clamp(std::lround(v * 255.0), 0L, 255L) / 255.0;
    return q;
}

void save_mask(const BinaryMask& mask, const std::string& path) {
    cv::Mat img(mask.height, mask.width, CV_8UC1);
    for (int y = 0; y < mask.height; ++y)
        for (int x = 0; x < mask.width; ++x)
            img.at<uint8_t>(y, x) = mask.at(x, y) ? 255 : 0;
    if (!cv::imwrite(path, img))
        throw UnreadableImage("cannot write mask: " + path);
}

BinaryMask load_mask(const std::string& path) {
    cv::Mat img = cv::imread(path, cv::IMREAD_GRAYSCALE);
    if (img.empty())
        throw UnreadableImage("cannot read mask: " + path);
    BinaryMask m(img.cols, img.rows);
    for (int y = 0; y < img.rows; ++y)
        for (int x = 0; x < img.cols; ++x)
            m.set(x, y, img.at<uint8_t>(y, x) >= 128);
    return m;
}

void save_trace_png16(const std::vector<double>& trace, int width, int height,
                      const std::string& path) {
    double maxv = 0.0;
    for (double v : trace) maxv = std::max(maxv, v);
    double scale = maxv > 0.0 ? 65535.0 / maxv : 1.0;

    cv::Mat img(height, width, CV_16UC1);
    for (int y = 0; y < height; ++y)
        for (int x = 0; x < width; ++x) {
            double v = trace[static_cast<size_t>(y) * width + x] * scale;
            img.at<uint16_t>(y, x) = cv::saturate_cast<uint16_t>(std::lround(v));
        }
    if (!cv::imwrite(path, img))
        throw UnreadableImage("cannot write trace: " + path);

    std::ofstream side(path + ".scale.txt");
    side.precision(17);
    side << scale << "\n";
}

std::vector<double> load_trace_png16(const std::string& path, int& width, int& height) {
    cv::Mat img = cv::imread(path, cv::IMREAD_UNCHANGED);
    if (img.empty() || img.type() != CV_16UC1)
        throw UnreadableImage("cannot read 16-bit trace: " + path);
    std::ifstream side(path + ".scale.txt");
    double scale = 1.0;
    if (!(side >> scale) || scale <= 0.0)
        throw UnreadableImage("missing or bad sidecar scale: " + path);

    width = img.cols;
    height = img.rows;
    std::vector<double> out(static_cast<size_t>(width) * height);
    for (int y = 0; y < height; ++y)
        for (int x = 0; x < width; ++x)
            out[static_cast<size_t>(y) * width + x] = img.at<uint16_t>(y, x) / scale;
    return out;
}

} // namespace skyflux
